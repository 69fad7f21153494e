use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, RiskError};
use crate::portfolio::ScenarioSet;

use super::{Copula, Family};

/// Default acceptance threshold on [`gof_distance`] for treating data and a
/// declared copula as matching.
///
/// In two dimensions the statistic is largest between the Fréchet bounds,
/// at about 0.041, so the threshold has to sit well below that to ever reject.
/// Independence against either bound scores about 0.011.
pub const DEFAULT_GOF_THRESHOLD: f64 = 0.01;

/// Weighted Kendall tau between marginals `i` and `j`:
/// Σ_{k<l} w_k w_l sgn(Δx) sgn(Δy) / Σ_{k<l} w_k w_l. Tied pairs count as 0.
pub fn kendall_tau(s: &ScenarioSet, i: usize, j: usize) -> Result<f64> {
    s.check_index(i)?;
    s.check_index(j)?;
    let x: Vec<f64> = s.column(i).collect();
    let y: Vec<f64> = s.column(j).collect();
    let w = s.weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..x.len() {
        for l in (k + 1)..x.len() {
            let ww = w[k] * w[l];
            let sx = sign(x[l] - x[k]);
            let sy = sign(y[l] - y[k]);
            num += ww * sx * sy;
            den += ww;
        }
    }
    if den == 0.0 {
        return Err(RiskError::Data(
            "kendall tau needs at least 2 scenarios".into(),
        ));
    }
    Ok(num / den)
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Pairwise Kendall taus as a symmetric matrix with unit diagonal.
#[allow(clippy::needless_range_loop)]
pub fn kendall_tau_matrix(s: &ScenarioSet) -> Result<Vec<Vec<f64>>> {
    let d = s.dim();
    let mut out = vec![vec![1.0; d]; d];
    for i in 0..d {
        for j in (i + 1)..d {
            let t = kendall_tau(s, i, j)?;
            out[i][j] = t;
            out[j][i] = t;
        }
    }
    Ok(out)
}

/// Result of a Kendall-tau inversion fit.
#[derive(Debug, Clone)]
pub struct ArchimedeanFit {
    pub copula: Copula,
    pub kendall_tau: f64,
    /// True when d > 2 and the tau used is the average of the pairwise taus.
    pub pairwise_averaged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitSummary {
    pub family: Family,
    pub theta: f64,
    pub kendall_tau: f64,
    pub pairwise_averaged: bool,
}

impl ArchimedeanFit {
    pub fn summary(&self) -> FitSummary {
        FitSummary {
            family: self.copula.family(),
            theta: self.copula.parameter().unwrap_or(f64::NAN),
            kendall_tau: self.kendall_tau,
            pairwise_averaged: self.pairwise_averaged,
        }
    }
}

const TAU_EDGE: f64 = 1e-12;

/// Fits a one-parameter Archimedean family by inverting Kendall's tau.
///
/// Clayton uses θ = 2τ/(1−τ), Gumbel θ = 1/(1−τ), and Frank solves
/// τ(θ) = 1 − 4/θ (1 − D₁(θ)) numerically.
pub fn fit_archimedean(s: &ScenarioSet, family: Family) -> Result<ArchimedeanFit> {
    let d = s.dim();
    if d < 2 {
        return Err(RiskError::UnsupportedDimension {
            op: "fit_archimedean",
            dim: d,
        });
    }
    if s.len() < 2 {
        return Err(RiskError::Data(format!(
            "fitting needs at least 2 scenarios, got {}",
            s.len()
        )));
    }
    let taus = kendall_tau_matrix(s)?;
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for (i, row) in taus.iter().enumerate() {
        for &t in &row[(i + 1)..] {
            sum += t;
            pairs += 1;
        }
    }
    let tau = sum / pairs as f64;
    let copula = match family {
        Family::Clayton => {
            if !(tau > TAU_EDGE && tau < 1.0 - TAU_EDGE) {
                return Err(RiskError::Fit(format!(
                    "clayton requires 0 < tau < 1, got tau = {tau}"
                )));
            }
            Copula::clayton(d, 2.0 * tau / (1.0 - tau))?
        }
        Family::Gumbel => {
            if !(tau > -TAU_EDGE && tau < 1.0 - TAU_EDGE) {
                return Err(RiskError::Fit(format!(
                    "gumbel requires 0 <= tau < 1, got tau = {tau}"
                )));
            }
            Copula::gumbel(d, 1.0 / (1.0 - tau.max(0.0)))?
        }
        Family::Frank => {
            if tau.abs() <= TAU_EDGE || tau.abs() >= 1.0 - TAU_EDGE {
                return Err(RiskError::Fit(format!(
                    "frank requires 0 < |tau| < 1, got tau = {tau}"
                )));
            }
            if d > 2 && tau < 0.0 {
                return Err(RiskError::Fit(format!(
                    "frank in dimension {d} requires tau > 0, got tau = {tau}"
                )));
            }
            Copula::frank(d, frank_theta_from_tau(tau))?
        }
        other => {
            return Err(RiskError::Fit(format!(
                "{other} is not an Archimedean family"
            )))
        }
    };
    Ok(ArchimedeanFit {
        copula,
        kendall_tau: tau,
        pairwise_averaged: d > 2,
    })
}

/// Debye function D₁(θ) = (1/θ) ∫₀^θ t/(eᵗ − 1) dt by composite Simpson.
fn debye1(theta: f64) -> f64 {
    const N: usize = 2000;
    let f = |t: f64| if t == 0.0 { 1.0 } else { t / t.exp_m1() };
    let h = theta / N as f64;
    let mut acc = f(0.0) + f(theta);
    for k in 1..N {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += weight * f(k as f64 * h);
    }
    acc * h / 3.0 / theta
}

pub(crate) fn frank_tau(theta: f64) -> f64 {
    1.0 - 4.0 / theta * (1.0 - debye1(theta))
}

fn frank_theta_from_tau(tau: f64) -> f64 {
    let target = tau.abs();
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    while frank_tau(hi) < target {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if frank_tau(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi) * tau.signum()
}

/// Cramér–von-Mises-style distance: the mean squared difference between two
/// copulas over the grid {k/grid_n}^d.
pub fn gof_distance(e: &Copula, c: &Copula, grid_n: usize) -> Result<f64> {
    let d = e.dim();
    if c.dim() != d {
        return Err(RiskError::DimensionMismatch {
            expected: d,
            found: c.dim(),
        });
    }
    if grid_n < 1 {
        return Err(RiskError::ParameterDomain {
            name: "grid_n",
            value: grid_n as f64,
            constraint: "grid_n >= 1",
        });
    }
    let side = grid_n + 1;
    let slab = side.pow(d as u32 - 1);
    let partial: Vec<f64> = (0..side)
        .into_par_iter()
        .map(|first| {
            let mut u = vec![0.0; d];
            let mut acc = 0.0;
            for rest in 0..slab {
                let mut index = first * slab + rest;
                for slot in u.iter_mut().rev() {
                    *slot = (index % side) as f64 / grid_n as f64;
                    index /= side;
                }
                let diff = e.eval_unchecked(&u) - c.eval_unchecked(&u);
                acc += diff * diff;
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum::<f64>() / (side * slab) as f64)
}
