mod common;

use common::{close, scenarios};
use jointrisk::{empirical_copula, gof_distance, ScenarioSet};
use proptest::prelude::*;

proptest! {
    #[test]
    fn survival_integrates_to_mean(s in scenarios(1, 20, 0)) {
        let integral = s.marginal(0).unwrap().breakpoints.iter().fold((0.0, 0.0), |(acc, left), &v| {
            (acc + (v - left) * s.marginal_survival(0, left).unwrap(), v)
        }).0;
        prop_assert!(close(integral, s.mean(0).unwrap(), 1e-12));
    }

    #[test]
    fn joint_survival_below_marginals(s in scenarios(3, 20, 0), t in prop::collection::vec(0.0..3.6f64, 3)) {
        let joint = s.joint_survival(&t).unwrap();
        for (i, &ti) in t.iter().enumerate() {
            prop_assert!(joint <= s.marginal_survival(i, ti).unwrap() + 1e-15);
        }
    }

    #[test]
    fn var_and_cvar_ordered_and_monotone(s in scenarios(1, 20, 0), a in 0.01..0.98f64, b in 0.01..0.98f64) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (v_lo, v_hi) = (s.var(0, lo).unwrap(), s.var(0, hi).unwrap());
        let (c_lo, c_hi) = (s.cvar(0, lo).unwrap(), s.cvar(0, hi).unwrap());
        prop_assert!(c_lo >= v_lo - 1e-12 && c_hi >= v_hi - 1e-12);
        prop_assert!(v_lo <= v_hi && c_lo <= c_hi + 1e-12);
    }

    #[test]
    fn strictly_increasing_transform_keeps_empirical_copula(s in scenarios(2, 20, 1), a in 0.5..3.0f64) {
        prop_assume!(s.len() >= 2);
        let f = |x: f64| a * x + x * x;
        let g = |x: f64| x.ln_1p();
        let t = s.comonotone_transform(&[&f, &g], true).unwrap();
        let (e0, e1) = (empirical_copula(&s).unwrap(), empirical_copula(&t).unwrap());
        let m = s.len();
        for i in 0..=m {
            for j in 0..=m {
                let u = [i as f64 / m as f64, j as f64 / m as f64];
                prop_assert_eq!(e0.eval(&u).unwrap(), e1.eval(&u).unwrap());
            }
        }
    }

    #[test]
    fn split_reassembles_and_keeps_copula(s in scenarios(2, 20, 1)) {
        prop_assume!(s.len() >= 2);
        let (y, z) = s.pi_comonotone_split();
        prop_assert_eq!(&y.add(&z).unwrap(), &s);
        let e = empirical_copula(&s).unwrap();
        prop_assert_eq!(gof_distance(&e, &empirical_copula(&y).unwrap(), 40).unwrap(), 0.0);
        prop_assert_eq!(gof_distance(&e, &empirical_copula(&z).unwrap(), 40).unwrap(), 0.0);
    }
}

#[test]
fn lemma_clamps_keep_ranks() {
    // h(x) = min(x, a) − min(x, b) with b < a is non-decreasing, and strictly
    // increasing on (b, a), where all values lie
    let s = ScenarioSet::from_rows(vec![vec![1.0, 5.0], vec![2.0, 3.0], vec![4.0, 4.5]]).unwrap();
    let h1 = |x: f64| x.min(10.0) - x.min(0.5);
    let h2 = |x: f64| x.min(6.0) - x.min(2.0);
    let t = s.comonotone_transform(&[&h1, &h2], true).unwrap();
    let e0 = empirical_copula(&s).unwrap();
    let e1 = empirical_copula(&t).unwrap();
    assert_eq!(gof_distance(&e0, &e1, 30).unwrap(), 0.0);
}
