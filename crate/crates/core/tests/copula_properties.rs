mod common;

use common::{copula_strategy, families, unit_point};
use jointrisk::{empirical_copula, frechet_bounds, frechet_distances, Copula, ScenarioSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn values_lie_between_frechet_bounds(c in copula_strategy(2), u in unit_point(2)) {
        let (w, m) = frechet_bounds(&u).unwrap();
        let v = c.eval(&u).unwrap();
        prop_assert!(w - 1e-12 <= v && v <= m + 1e-12, "{} at {u:?}: {v}", c.label());
    }

    #[test]
    fn values_lie_between_frechet_bounds_3d(c in copula_strategy(3), u in unit_point(3)) {
        let (w, m) = frechet_bounds(&u).unwrap();
        let v = c.eval(&u).unwrap();
        prop_assert!(w - 1e-12 <= v && v <= m + 1e-12);
    }

    #[test]
    fn box_increments_are_nonnegative(
        c in copula_strategy(3),
        a in unit_point(3),
        b in unit_point(3),
    ) {
        let lo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
        let hi: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
        prop_assert!(c.box_increment(&lo, &hi).unwrap() >= -1e-12);
        prop_assert!(c.survival().box_increment(&lo, &hi).unwrap() >= -1e-12);
    }

    #[test]
    fn survival_is_an_involution(c in copula_strategy(2), u in unit_point(2)) {
        let twice = c.survival().survival();
        prop_assert!((twice.eval(&u).unwrap() - c.eval(&u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn survival_is_grounded_with_uniform_margins(c in copula_strategy(3), x in 0.0..=1.0f64, i in 0..3usize) {
        let mut u = vec![1.0; 3];
        u[i] = x;
        prop_assert!((c.survival_eval(&u).unwrap() - x).abs() < 1e-12);
        u[(i + 1) % 3] = 0.0;
        prop_assert_eq!(c.survival_eval(&u).unwrap(), 0.0);
    }
}

#[test]
fn upper_distance_never_exceeds_span() {
    for d in 2..=3 {
        for c in families(d) {
            let fd = frechet_distances(&c, 20).unwrap();
            assert!(fd.d_ul > 0.0);
            assert!(
                fd.d_uc >= 0.0 && fd.d_uc <= fd.d_ul + 1e-12,
                "{}",
                c.label()
            );
        }
    }
}

#[test]
fn d_ul_is_grid_max_of_m_minus_w() {
    let n = 30;
    let mut best: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let (w, m) = frechet_bounds(&[i as f64 / n as f64, j as f64 / n as f64]).unwrap();
            best = best.max(m - w);
        }
    }
    let fd = frechet_distances(&Copula::independence(2).unwrap(), n).unwrap();
    assert_eq!(fd.d_ul, best);
}

#[test]
fn comonotone_sample_distance_shrinks() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut prev = f64::INFINITY;
    for m in [10, 100, 1000] {
        let rows = (0..m)
            .map(|_| {
                let z: f64 = rng.random();
                vec![z, z * z]
            })
            .collect();
        let e = empirical_copula(&ScenarioSet::from_rows(rows).unwrap()).unwrap();
        let d = frechet_distances(&e, 50).unwrap().d_uc;
        assert!(d < prev, "m = {m}: {d} >= {prev}");
        prev = d;
    }
}
