//! Weighted discrete scenario sets and their marginal step functions.

use serde::Serialize;

use crate::distortion::PROB_EPS;
use crate::error::{Result, RiskError};

/// Tolerance on the total scenario weight before it is renormalized.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A discrete joint loss distribution: `len` scenarios of `dim` losses each,
/// with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    names: Vec<String>,
    dim: usize,
    /// Row-major, `len × dim`.
    data: Vec<f64>,
    weights: Vec<f64>,
    nonnegative: bool,
    renormalized: bool,
}

impl ScenarioSet {
    /// Builds a scenario set. Weights default to uniform; weights whose sum
    /// differs from 1 by more than [`WEIGHT_SUM_TOL`] are rescaled and the set
    /// remembers that it was renormalized.
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>, weights: Option<Vec<f64>>) -> Result<Self> {
        let dim = names.len();
        if dim == 0 {
            return Err(RiskError::Data(
                "a scenario set needs at least one asset".into(),
            ));
        }
        if rows.is_empty() {
            return Err(RiskError::Data(
                "a scenario set needs at least one scenario".into(),
            ));
        }
        let m = rows.len();
        let mut data = Vec::with_capacity(m * dim);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(RiskError::Data(format!(
                    "scenario {k} has {} losses, expected {dim}",
                    row.len()
                )));
            }
            for (i, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(RiskError::Data(format!(
                        "scenario {k}, asset {i}: loss {x} is not finite"
                    )));
                }
            }
            data.extend_from_slice(row);
        }
        let (weights, renormalized) = match weights {
            None => (vec![1.0 / m as f64; m], false),
            Some(w) => {
                if w.len() != m {
                    return Err(RiskError::Data(format!(
                        "{} weights for {m} scenarios",
                        w.len()
                    )));
                }
                if let Some((k, &bad)) = w
                    .iter()
                    .enumerate()
                    .find(|(_, &x)| !(x.is_finite() && x > 0.0))
                {
                    return Err(RiskError::Data(format!(
                        "scenario {k} has non-positive weight {bad}"
                    )));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > WEIGHT_SUM_TOL {
                    (w.iter().map(|x| x / total).collect(), true)
                } else {
                    (w, false)
                }
            }
        };
        let nonnegative = data.iter().all(|&x| x >= 0.0);
        Ok(Self {
            names,
            dim,
            data,
            weights,
            nonnegative,
            renormalized,
        })
    }

    /// Equally weighted scenarios with default asset names `x1, x2, …`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        Self::new(default_names(dim), rows, None)
    }

    pub fn with_weights(rows: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        Self::new(default_names(dim), rows, Some(weights))
    }

    /// The degenerate portfolio that pays `values` with certainty.
    pub fn constant(values: &[f64]) -> Result<Self> {
        Self::from_rows(vec![values.to_vec()])
    }

    /// The unit portfolio (1, …, 1).
    pub fn unit(dim: usize) -> Result<Self> {
        Self::constant(&vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }

    /// Whether the supplied weights had to be rescaled to sum to one.
    pub fn weights_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn value(&self, k: usize, i: usize) -> f64 {
        self.data[k * self.dim + i]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.data[k * self.dim..(k + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn column(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().skip(i).step_by(self.dim).copied()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim {
            Ok(())
        } else {
            Err(RiskError::IndexOutOfRange {
                index: i,
                dim: self.dim,
            })
        }
    }

    pub(crate) fn require_nonnegative(&self, op: &'static str) -> Result<()> {
        if self.nonnegative {
            return Ok(());
        }
        let pos = self.data.iter().position(|&x| x < 0.0).unwrap_or(0);
        Err(RiskError::NegativeLoss {
            op,
            marginal: pos % self.dim,
            value: self.data[pos],
        })
    }

    pub fn max_loss(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Step survival function of marginal `i`.
    pub fn marginal(&self, i: usize) -> Result<StepSurvival> {
        self.check_index(i)?;
        Ok(StepSurvival::from_weighted(
            self.column(i).zip(self.weights.iter().copied()),
        ))
    }

    /// S_i(t) = P(X_i > t).
    pub fn marginal_survival(&self, i: usize, t: f64) -> Result<f64> {
        Ok(self.marginal(i)?.survival(t))
    }

    /// S(t) = P(X > t componentwise).
    pub fn joint_survival(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.dim {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim,
                found: t.len(),
            });
        }
        Ok(self
            .rows()
            .zip(&self.weights)
            .filter(|(row, _)| row.iter().zip(t).all(|(x, s)| x > s))
            .map(|(_, w)| w)
            .sum())
    }

    /// Weighted mean of marginal `i`.
    pub fn mean(&self, i: usize) -> Result<f64> {
        self.check_index(i)?;
        Ok(self.column(i).zip(&self.weights).map(|(x, w)| x * w).sum())
    }

    /// VaR_α(X_i) = inf{x : P(X_i ≤ x) ≥ α}.
    pub fn var(&self, i: usize, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(self.marginal(i)?.quantile(alpha))
    }

    /// CVaR_α(X_i) = (1/(1−α)) ∫_α^1 VaR_θ(X_i) dθ, evaluated exactly over the
    /// step quantile function.
    pub fn cvar(&self, i: usize, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(self.marginal(i)?.upper_tail_mean(alpha))
    }

    /// Applies `f(i, x)` to every loss; weights are kept.
    pub fn map_values(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let data: Vec<f64> = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, &x)| f(idx % self.dim, x))
            .collect();
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(RiskError::Data(format!(
                "transform produced a non-finite loss for scenario {}, asset {}",
                pos / self.dim,
                pos % self.dim
            )));
        }
        let nonnegative = data.iter().all(|&x| x >= 0.0);
        Ok(Self {
            names: self.names.clone(),
            dim: self.dim,
            data,
            weights: self.weights.clone(),
            nonnegative,
            renormalized: self.renormalized,
        })
    }

    /// Scenario-wise sum of two sets with identical weights.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if other.weights != self.weights {
            return Err(RiskError::Data(
                "scenario sets must share scenarios and weights to be added".into(),
            ));
        }
        let data = self.data.clone();
        let summed = Self {
            data,
            ..self.clone()
        };
        summed.map_values_indexed(|idx, x| x + other.data[idx])
    }

    fn map_values_indexed(&self, f: impl Fn(usize, f64) -> f64) -> Result<Self> {
        let data: Vec<f64> = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, &x)| f(idx, x))
            .collect();
        let mut out = self.map_values(|_, x| x)?;
        out.nonnegative = data.iter().all(|&x| x >= 0.0);
        out.data = data;
        Ok(out)
    }

    /// Builds the set whose columns are taken from `self` where `pick[i]` is
    /// false and from `other` where it is true.
    pub fn mix_columns(&self, other: &Self, pick: &[bool]) -> Result<Self> {
        if other.dim != self.dim || pick.len() != self.dim {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim,
                found: other.dim.min(pick.len()),
            });
        }
        if other.weights != self.weights {
            return Err(RiskError::Data(
                "scenario sets must share scenarios and weights to be mixed".into(),
            ));
        }
        self.map_values_indexed(|idx, x| {
            if pick[idx % self.dim] {
                other.data[idx]
            } else {
                x
            }
        })
    }

    /// Reorders scenarios; `order[k]` is the source index of new scenario `k`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        for &k in order {
            if k >= self.len() || std::mem::replace(&mut seen[k], true) {
                return Err(RiskError::Data("not a permutation of the scenarios".into()));
            }
        }
        if order.len() != self.len() {
            return Err(RiskError::Data("not a permutation of the scenarios".into()));
        }
        let rows = order.iter().map(|&k| self.row(k).to_vec()).collect();
        let weights = order.iter().map(|&k| self.weights[k]).collect();
        Self::new(self.names.clone(), rows, Some(weights))
    }

    /// Splits scenario `k` into two copies carrying `fraction` and
    /// `1 − fraction` of its weight. The joint distribution is unchanged.
    pub fn split_scenario(&self, k: usize, fraction: f64) -> Result<Self> {
        if k >= self.len() || !(fraction > 0.0 && fraction < 1.0) {
            return Err(RiskError::Data(format!(
                "cannot split scenario {k} with fraction {fraction}"
            )));
        }
        let mut rows: Vec<Vec<f64>> = self.rows().map(<[f64]>::to_vec).collect();
        let mut weights = self.weights.clone();
        rows.push(self.row(k).to_vec());
        weights.push(self.weights[k] * (1.0 - fraction));
        weights[k] *= fraction;
        Self::new(self.names.clone(), rows, Some(weights))
    }

    /// The portfolio (1, …, 1, X_i, 1, …, 1).
    pub fn embed_marginal(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        self.map_values(|j, x| if j == i { x } else { 1.0 })
    }

    /// Applies a non-decreasing map to each marginal.
    ///
    /// Monotonicity is checked on the marginal's distinct values. With
    /// `preserve_copula`, maps that merge two distinct values are rejected,
    /// since ties change the empirical copula.
    pub fn comonotone_transform(
        &self,
        maps: &[&dyn Fn(f64) -> f64],
        preserve_copula: bool,
    ) -> Result<Self> {
        if maps.len() != self.dim {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim,
                found: maps.len(),
            });
        }
        for (i, h) in maps.iter().enumerate() {
            let values = self.marginal(i)?.breakpoints;
            for w in values.windows(2) {
                let (y0, y1) = (h(w[0]), h(w[1]));
                if y1 < y0 {
                    return Err(RiskError::NotMonotone {
                        marginal: i,
                        x0: w[0],
                        y0,
                        x1: w[1],
                        y1,
                    });
                }
                if preserve_copula && y1 == y0 {
                    return Err(RiskError::TiesIntroduced {
                        marginal: i,
                        x0: w[0],
                        x1: w[1],
                    });
                }
            }
        }
        self.map_values(|i, x| maps[i](x))
    }

    /// Splits X into Y = X/2 and Z = X − Y, two π-comonotone halves.
    pub fn pi_comonotone_split(&self) -> (Self, Self) {
        let y = self
            .map_values(|_, x| x * 0.5)
            .expect("halving keeps losses finite");
        let z = self
            .map_values_indexed(|idx, x| x - y.data[idx])
            .expect("differences of finite losses are finite");
        (y, z)
    }

    /// Splits X into Y = h(X) and Z = X − h(X), marginal by marginal. Both
    /// `h(i, ·)` and `x − h(i, x)` must be non-decreasing on the marginal's
    /// values so that Y and Z are comonotone with X.
    pub fn pi_comonotone_split_with(&self, h: impl Fn(usize, f64) -> f64) -> Result<(Self, Self)> {
        for i in 0..self.dim {
            let values = self.marginal(i)?.breakpoints;
            for w in values.windows(2) {
                let (a0, a1) = (h(i, w[0]), h(i, w[1]));
                let (b0, b1) = (w[0] - a0, w[1] - a1);
                if a1 < a0 {
                    return Err(RiskError::NotMonotone {
                        marginal: i,
                        x0: w[0],
                        y0: a0,
                        x1: w[1],
                        y1: a1,
                    });
                }
                if b1 < b0 {
                    return Err(RiskError::NotMonotone {
                        marginal: i,
                        x0: w[0],
                        y0: b0,
                        x1: w[1],
                        y1: b1,
                    });
                }
            }
        }
        let y = self.map_values(&h)?;
        let z = self.map_values_indexed(|idx, x| x - y.data[idx])?;
        Ok((y, z))
    }

    pub fn summary(&self) -> ScenarioSummary {
        ScenarioSummary {
            dim: self.dim,
            scenarios: self.len(),
            names: self.names.clone(),
            means: (0..self.dim)
                .map(|i| self.mean(i).unwrap_or(f64::NAN))
                .collect(),
            minima: (0..self.dim)
                .map(|i| self.column(i).fold(f64::INFINITY, f64::min))
                .collect(),
            maxima: (0..self.dim)
                .map(|i| self.column(i).fold(f64::NEG_INFINITY, f64::max))
                .collect(),
            nonnegative: self.nonnegative,
            weights_renormalized: self.renormalized,
        }
    }
}

fn default_names(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(RiskError::ParameterDomain {
            name: "alpha",
            value: alpha,
            constraint: "0 < alpha < 1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub dim: usize,
    pub scenarios: usize,
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub minima: Vec<f64>,
    pub maxima: Vec<f64>,
    pub nonnegative: bool,
    pub weights_renormalized: bool,
}

/// Right-continuous step survival function of one marginal.
///
/// `tail[j] = P(X > breakpoints[j])`; S(t) = 1 below the first breakpoint and
/// 0 from the last one on.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSurvival {
    pub breakpoints: Vec<f64>,
    pub tail: Vec<f64>,
    /// `cumulative[j] = P(X ≤ breakpoints[j])`; the last entry is exactly 1.
    pub cumulative: Vec<f64>,
}

impl StepSurvival {
    pub fn from_weighted(values: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut pairs: Vec<(f64, f64)> = values.into_iter().collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut mass: Vec<f64> = Vec::new();
        for (x, w) in pairs {
            if breakpoints.last() == Some(&x) {
                *mass.last_mut().expect("parallel vectors") += w;
            } else {
                breakpoints.push(x);
                mass.push(w);
            }
        }
        let n = mass.len();
        let mut tail = vec![0.0; n];
        let mut acc = 0.0;
        for j in (0..n).rev() {
            tail[j] = acc;
            acc += mass[j];
        }
        let mut cumulative = vec![0.0; n];
        let mut acc = 0.0;
        for j in 0..n {
            acc += mass[j];
            cumulative[j] = acc;
        }
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self {
            breakpoints,
            tail,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    pub fn survival(&self, t: f64) -> f64 {
        let j = self.breakpoints.partition_point(|&v| v <= t);
        if j == 0 {
            1.0
        } else {
            self.tail[j - 1]
        }
    }

    /// Left-continuous generalized quantile inf{x : F(x) ≥ α}.
    pub fn quantile(&self, alpha: f64) -> f64 {
        let j = self
            .cumulative
            .iter()
            .position(|&c| c >= alpha - PROB_EPS)
            .unwrap_or(self.len() - 1);
        self.breakpoints[j]
    }

    /// Mean of the quantile function over (α, 1).
    pub fn upper_tail_mean(&self, alpha: f64) -> f64 {
        let width = 1.0 - alpha;
        let mut acc = 0.0;
        let mut prev: f64 = 0.0;
        for (&v, &c) in self.breakpoints.iter().zip(&self.cumulative) {
            let len = c - prev.max(alpha);
            if len > 0.0 {
                acc += v * len;
            }
            prev = c;
        }
        if acc == 0.0 || width <= 0.0 {
            return self.breakpoints[self.len() - 1];
        }
        acc / width
    }

    /// Exact ∫ g(S(x)) dx over [lower, ∞) for a nonnegative integrand that
    /// vanishes once S = 0, where `lower` does not exceed the first breakpoint.
    ///
    /// Adjacent steps with equal g(S) are merged before multiplying, so a 0/1
    /// integrand returns a breakpoint difference without rounding drift.
    pub(crate) fn integrate_from(&self, lower: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        let mut run_start = lower;
        let mut run_level = g(1.0);
        for (&v, &s) in self.breakpoints.iter().zip(&self.tail) {
            let level = g(s);
            if level != run_level {
                if v > run_start {
                    acc += (v - run_start) * run_level;
                }
                run_start = v.max(run_start);
                run_level = level;
            }
        }
        acc
    }
}
