use crate::error::{Result, RiskError};
use crate::portfolio::ScenarioSet;

use super::Copula;

/// Slack for comparing accumulated rank sums against grid points such as k/m.
const RANK_EPS: f64 = 1e-12;

/// Rank data behind an empirical copula: one normalized mid-rank per scenario
/// and marginal, plus the scenario weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCopula {
    dim: usize,
    /// Row-major, `len × dim`.
    pseudo: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalCopula {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Normalized mid-rank of scenario `k` in marginal `i`.
    pub fn pseudo_observation(&self, k: usize, i: usize) -> f64 {
        self.pseudo[k * self.dim + i]
    }

    pub(crate) fn eval(&self, u: &[f64]) -> f64 {
        self.pseudo
            .chunks_exact(self.dim)
            .zip(&self.weights)
            .filter(|(row, _)| row.iter().zip(u).all(|(p, x)| *p <= x + RANK_EPS))
            .map(|(_, w)| w)
            .sum()
    }
}

/// Weighted mid-rank pseudo-observations of one marginal.
///
/// Scenarios are sorted by value; a tie group with total weight `W`, weights
/// `w_k` and cumulative weight `B` before it gets the rank
/// `B + (W² + Σ w_k²) / (2W)`, which for equal weights is the classical
/// mid-rank divided by the number of scenarios.
pub(crate) fn mid_ranks(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut before = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let group = &order[start..end];
        let total: f64 = group.iter().map(|&k| weights[k]).sum();
        let squares: f64 = group.iter().map(|&k| weights[k] * weights[k]).sum();
        let rank = if group.len() == 1 {
            before + total
        } else {
            before + (total * total + squares) / (2.0 * total)
        };
        for &k in group {
            ranks[k] = rank.min(1.0);
        }
        before += total;
        start = end;
    }
    ranks
}

/// The weighted empirical copula of a scenario set: C(u) is the weight of the
/// scenarios whose normalized mid-ranks are all ≤ u.
pub fn empirical_copula(s: &ScenarioSet) -> Result<Copula> {
    if s.len() < 2 {
        return Err(RiskError::Data(format!(
            "an empirical copula needs at least 2 scenarios, got {}",
            s.len()
        )));
    }
    let d = s.dim();
    let m = s.len();
    let mut pseudo = vec![0.0; m * d];
    for i in 0..d {
        let col: Vec<f64> = s.column(i).collect();
        for (k, r) in mid_ranks(&col, s.weights()).into_iter().enumerate() {
            pseudo[k * d + i] = r;
        }
    }
    Ok(Copula::from_empirical(EmpiricalCopula {
        dim: d,
        pseudo,
        weights: s.weights().to_vec(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(rows: Vec<Vec<f64>>) -> ScenarioSet {
        ScenarioSet::from_rows(rows).unwrap()
    }

    #[test]
    fn comonotone_pair() {
        let c = empirical_copula(&set(vec![vec![1.0, 1.0], vec![2.0, 2.0]])).unwrap();
        assert_eq!(c.eval(&[0.5, 0.5]).unwrap(), 0.5);
        assert_eq!(c.eval(&[0.0, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn countermonotone_pair() {
        let c = empirical_copula(&set(vec![vec![1.0, 2.0], vec![2.0, 1.0]])).unwrap();
        assert_eq!(c.eval(&[0.5, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn mid_ranks_average_ties() {
        let r = mid_ranks(&[3.0, 1.0, 3.0, 2.0], &[0.25; 4]);
        assert_eq!(r, vec![0.875, 0.25, 0.875, 0.5]);
    }

    #[test]
    fn mid_ranks_weighted_group_is_order_free() {
        let w = [0.1, 0.2, 0.3, 0.4];
        let a = mid_ranks(&[5.0, 5.0, 1.0, 5.0], &w);
        let b = mid_ranks(&[5.0, 5.0, 1.0, 5.0], &w);
        assert_eq!(a, b);
        // group {0,1,3}: B = 0.3, W = 0.7, Σw² = 0.01+0.04+0.16
        let expect = 0.3 + (0.49 + 0.21) / 1.4;
        assert!((a[0] - expect).abs() < 1e-15);
        assert!((a[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn uniform_margins_at_rank_grid() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|k| vec![k as f64, ((k * 7) % 10) as f64])
            .collect();
        let c = empirical_copula(&set(rows)).unwrap();
        for k in 0..=10 {
            let u = k as f64 / 10.0;
            assert!((c.eval(&[u, 1.0]).unwrap() - u).abs() < 1e-12);
            assert!((c.eval(&[1.0, u]).unwrap() - u).abs() < 1e-12);
        }
        // between rank points the margin is a step function, not the identity
        assert!((c.eval(&[0.15, 1.0]).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn needs_two_scenarios() {
        assert!(empirical_copula(&set(vec![vec![1.0, 2.0]])).is_err());
    }
}
