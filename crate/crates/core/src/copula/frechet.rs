use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_unit, Result, RiskError};

use super::Copula;

/// Fréchet–Hoeffding bounds (W(u), M(u)) with W(u) = max(Σuᵢ − d + 1, 0) and
/// M(u) = min uᵢ.
pub fn frechet_bounds(u: &[f64]) -> Result<(f64, f64)> {
    if u.is_empty() {
        return Err(RiskError::UnsupportedDimension {
            op: "frechet_bounds",
            dim: 0,
        });
    }
    for &x in u {
        check_unit("bound argument", x)?;
    }
    Ok((lower_bound(u), upper_bound(u)))
}

fn lower_bound(u: &[f64]) -> f64 {
    let d = u.len() as f64;
    (u.iter().sum::<f64>() - d + 1.0).max(0.0)
}

fn upper_bound(u: &[f64]) -> f64 {
    u.iter().copied().fold(1.0, f64::min)
}

/// Default grid resolution for the distance maximization in dimension `d`.
pub fn default_grid_n(d: usize) -> usize {
    match d {
        0..=2 => 200,
        3 => 50,
        4 => 20,
        _ => 10,
    }
}

/// Grid maxima of M − W (`d_ul`) and M − C (`d_uc`) over {k/n}^d.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrechetDistances {
    pub d_ul: f64,
    pub d_uc: f64,
    pub argmax_ul: Vec<f64>,
    pub argmax_uc: Vec<f64>,
    pub grid_n: usize,
}

#[derive(Clone, Copy)]
struct Best {
    value: f64,
    index: usize,
}

impl Best {
    const NONE: Best = Best {
        value: f64::NEG_INFINITY,
        index: usize::MAX,
    };

    fn offer(self, value: f64, index: usize) -> Best {
        if value > self.value || (value == self.value && index < self.index) {
            Best { value, index }
        } else {
            self
        }
    }

    fn merge(self, other: Best) -> Best {
        self.offer(other.value, other.index)
    }
}

fn grid_point(mut index: usize, d: usize, n: usize, out: &mut [f64]) {
    for slot in out.iter_mut().take(d).rev() {
        *slot = (index % (n + 1)) as f64 / n as f64;
        index /= n + 1;
    }
}

/// Both maxima in one pass over the closed grid {0, 1/n, …, 1}^d.
///
/// Ties are broken towards the lexicographically smallest grid point, so the
/// result does not depend on how the work is split across threads.
pub fn frechet_distances(c: &Copula, grid_n: usize) -> Result<FrechetDistances> {
    let d = c.dim();
    if d < 2 {
        return Err(RiskError::UnsupportedDimension {
            op: "frechet_distances",
            dim: d,
        });
    }
    if grid_n < 2 {
        return Err(RiskError::ParameterDomain {
            name: "grid_n",
            value: grid_n as f64,
            constraint: "grid_n >= 2",
        });
    }
    let side = grid_n + 1;
    let slab = side.pow(d as u32 - 1);
    let (ul, uc) = (0..side)
        .into_par_iter()
        .map(|first| {
            let mut u = vec![0.0; d];
            let mut best_ul = Best::NONE;
            let mut best_uc = Best::NONE;
            for rest in 0..slab {
                let index = first * slab + rest;
                grid_point(index, d, grid_n, &mut u);
                let m = upper_bound(&u);
                best_ul = best_ul.offer(m - lower_bound(&u), index);
                best_uc = best_uc.offer(m - c.eval_unchecked(&u), index);
            }
            (best_ul, best_uc)
        })
        .reduce(
            || (Best::NONE, Best::NONE),
            |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
        );
    let mut argmax_ul = vec![0.0; d];
    let mut argmax_uc = vec![0.0; d];
    grid_point(ul.index, d, grid_n, &mut argmax_ul);
    grid_point(uc.index, d, grid_n, &mut argmax_uc);
    Ok(FrechetDistances {
        d_ul: ul.value,
        d_uc: uc.value,
        argmax_ul,
        argmax_uc,
        grid_n,
    })
}
