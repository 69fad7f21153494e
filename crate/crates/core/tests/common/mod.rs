#![allow(dead_code)]

use jointrisk::{Copula, ScenarioSet};
use proptest::prelude::*;

/// Relative agreement with a 1e-12 absolute floor.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= (rel * a.abs().max(b.abs())).max(1e-12)
}

/// Nonnegative scenario sets with losses k/10, k ∈ {lo..=35}, and random
/// positive weights.
pub fn scenarios(dim: usize, max_rows: usize, lo: u32) -> impl Strategy<Value = ScenarioSet> {
    (1..=max_rows)
        .prop_flat_map(move |m| {
            (
                prop::collection::vec(prop::collection::vec(lo..=35u32, dim), m),
                prop::collection::vec(1..=10u32, m),
            )
        })
        .prop_map(|(rows, w)| {
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(|k| f64::from(k) / 10.0).collect())
                .collect();
            let w = w.into_iter().map(f64::from).collect();
            ScenarioSet::with_weights(rows, w).unwrap()
        })
}

/// Signed two-dimensional scenario sets with losses in [-2, 2].
pub fn signed_scenarios(max_rows: usize) -> impl Strategy<Value = ScenarioSet> {
    prop::collection::vec(prop::collection::vec(-20..=20i32, 2), 1..=max_rows).prop_map(|rows| {
        ScenarioSet::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|k| f64::from(k) / 10.0).collect())
                .collect(),
        )
        .unwrap()
    })
}

/// The parametric families used throughout, in dimension `d`.
pub fn families(d: usize) -> Vec<Copula> {
    let mut out = vec![
        Copula::independence(d).unwrap(),
        Copula::comonotone(d).unwrap(),
        Copula::clayton(d, 2.0).unwrap(),
        Copula::gumbel(d, 2.0).unwrap(),
        Copula::frank(d, 5.0).unwrap(),
    ];
    if d == 2 {
        out.push(Copula::countermonotone());
        out.push(Copula::frank(2, -3.0).unwrap());
    }
    out
}

pub fn copula_strategy(d: usize) -> impl Strategy<Value = Copula> {
    let all = families(d);
    (0..all.len()).prop_map(move |k| all[k].clone())
}

pub fn unit_point(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..=1.0f64, d)
}
