//! The scalar joint risk measure Γ(X, C) in three formulations.
//!
//! All three realize the set function μ_C only on upper orthants, through
//! μ_C(∏{X_i > t_i}) = C*(g_1(S_1(t_1)), …, g_d(S_d(t_d))).

use rayon::prelude::*;
use serde::Serialize;

use crate::copula::Copula;
use crate::distortion::{alpha_c, AdjustedConfidence, ConfidenceBand, DistortionFn, TailKind};
use crate::error::{Result, RiskError};
use crate::portfolio::{ScenarioSet, StepSurvival};

/// A concrete measure: the copula C* and one distortion per marginal.
#[derive(Debug, Clone)]
pub struct JointRiskSpec {
    cstar: Copula,
    distortions: Vec<DistortionFn>,
}

impl JointRiskSpec {
    pub fn new(cstar: Copula, distortions: Vec<DistortionFn>) -> Result<Self> {
        if distortions.len() != cstar.dim() {
            return Err(RiskError::DimensionMismatch {
                expected: cstar.dim(),
                found: distortions.len(),
            });
        }
        Ok(Self { cstar, distortions })
    }

    /// The same distortion on every marginal.
    pub fn uniform(cstar: Copula, g: DistortionFn) -> Self {
        let distortions = vec![g; cstar.dim()];
        Self { cstar, distortions }
    }

    /// The mixed VaR/CVaR measure: C* = Ĉ and every g_i the step or ramp
    /// distortion at the dependence-adjusted level α_c.
    pub fn mixture(
        c: &Copula,
        band: ConfidenceBand,
        kinds: &[TailKind],
        grid_n: usize,
    ) -> Result<(Self, AdjustedConfidence)> {
        if kinds.len() != c.dim() {
            return Err(RiskError::DimensionMismatch {
                expected: c.dim(),
                found: kinds.len(),
            });
        }
        let adjusted = alpha_c(c, band, grid_n)?;
        let distortions = kinds
            .iter()
            .map(|k| k.distortion(adjusted.alpha_c))
            .collect::<Result<Vec<_>>>()?;
        Ok((Self::new(c.survival(), distortions)?, adjusted))
    }

    pub fn dim(&self) -> usize {
        self.cstar.dim()
    }

    pub fn cstar(&self) -> &Copula {
        &self.cstar
    }

    pub fn distortions(&self) -> &[DistortionFn] {
        &self.distortions
    }

    /// μ_C of the orthant whose marginal tail probabilities are `probs`.
    pub fn orthant_measure(&self, probs: &[f64]) -> Result<f64> {
        if probs.len() != self.dim() {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim(),
                found: probs.len(),
            });
        }
        let g: Vec<f64> = probs
            .iter()
            .zip(&self.distortions)
            .map(|(&p, g)| g.eval(p))
            .collect::<Result<_>>()?;
        self.cstar.eval(&g)
    }

    pub(crate) fn check_portfolio(&self, s: &ScenarioSet, op: &'static str) -> Result<()> {
        if s.dim() != self.dim() {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim(),
                found: s.dim(),
            });
        }
        s.require_nonnegative(op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Piece {
    pub width: f64,
    /// g_i(S_i) on the piece.
    pub level: f64,
}

/// Splits [lo, hi) into maximal pieces on which g(S) is constant.
pub(crate) fn axis_pieces(ss: &StepSurvival, g: &DistortionFn, lo: f64, hi: f64) -> Vec<Piece> {
    let mut out = Vec::new();
    let mut left = lo;
    let mut level = g.apply(ss.survival(lo));
    for &v in &ss.breakpoints {
        if v <= left {
            continue;
        }
        if v >= hi {
            break;
        }
        let next = g.apply(ss.survival(v));
        if next != level {
            out.push(Piece {
                width: v - left,
                level,
            });
            left = v;
            level = next;
        }
    }
    if hi > left {
        out.push(Piece {
            width: hi - left,
            level,
        });
    }
    out
}

/// Σ over the tensor grid of (∏ widths) × f(levels).
///
/// Slabs along the first axis are summed in parallel, then combined in index
/// order, so the result is bit-reproducible.
pub(crate) fn tensor_sum(axes: &[Vec<Piece>], f: impl Fn(&[f64]) -> f64 + Sync) -> f64 {
    let d = axes.len();
    if d == 0 || axes.iter().any(Vec::is_empty) {
        return 0.0;
    }
    let slabs: Vec<f64> = axes[0]
        .par_iter()
        .map(|first| {
            let mut idx = vec![0usize; d];
            let mut levels = vec![0.0; d];
            levels[0] = first.level;
            let mut acc = 0.0;
            loop {
                let mut volume = first.width;
                for i in 1..d {
                    let p = axes[i][idx[i]];
                    volume *= p.width;
                    levels[i] = p.level;
                }
                acc += volume * f(&levels);
                // odometer over axes 1..d
                let mut i = d - 1;
                loop {
                    if i == 0 {
                        return acc;
                    }
                    idx[i] += 1;
                    if idx[i] < axes[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i -= 1;
                }
            }
        })
        .collect();
    slabs.iter().sum()
}

/// Γ = ∫_{ℝ₊^d} C*(g_1(S_1(t_1)), …, g_d(S_d(t_d))) dt, summed exactly over
/// the cells spanned by the marginal breakpoints.
pub fn gamma_survival_form(s: &ScenarioSet, spec: &JointRiskSpec) -> Result<f64> {
    spec.check_portfolio(s, "gamma_survival_form")?;
    let axes = (0..s.dim())
        .map(|i| {
            let ss = s.marginal(i)?;
            let hi = ss.breakpoints[ss.len() - 1];
            Ok(axis_pieces(&ss, &spec.distortions[i], 0.0, hi))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tensor_sum(&axes, |g| spec.cstar.eval_unchecked(g)))
}

/// Γ = ∫ x_1⋯x_d dL(x), where L is the Lebesgue–Stieltjes measure of the
/// distorted joint survival function t ↦ μ_C(∏{X_i > t_i}). On step data L
/// is a finite sum of atoms at the breakpoint grid.
pub fn gamma_ls_form(s: &ScenarioSet, spec: &JointRiskSpec) -> Result<f64> {
    spec.check_portfolio(s, "gamma_ls_form")?;
    let d = s.dim();
    // per axis: (x, g(S(previous atom)), g(S(x))) for every positive atom
    let axes = (0..d)
        .map(|i| {
            let ss = s.marginal(i)?;
            let g = &spec.distortions[i];
            let mut before = g.apply(1.0);
            let mut atoms = Vec::with_capacity(ss.len());
            for (&x, &tail) in ss.breakpoints.iter().zip(&ss.tail) {
                let after = g.apply(tail);
                if x > 0.0 {
                    atoms.push((x, before, after));
                }
                before = after;
            }
            Ok(atoms)
        })
        .collect::<Result<Vec<_>>>()?;
    if axes.iter().any(Vec::is_empty) {
        return Ok(0.0);
    }
    let mut idx = vec![0usize; d];
    let mut vertex = vec![0.0; d];
    let mut total = 0.0;
    loop {
        let mut weight = 1.0;
        for i in 0..d {
            weight *= axes[i][idx[i]].0;
        }
        let mut mass = 0.0;
        for mask in 0u64..(1u64 << d) {
            let mut upper = 0;
            for (i, v) in vertex.iter_mut().enumerate() {
                let atom = axes[i][idx[i]];
                if mask >> i & 1 == 1 {
                    *v = atom.2;
                    upper += 1;
                } else {
                    *v = atom.1;
                }
            }
            let term = spec.cstar.eval_unchecked(&vertex);
            if upper % 2 == 0 {
                mass += term;
            } else {
                mass -= term;
            }
        }
        total += weight * mass;
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(total);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < axes[i].len() {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// The dyadic approximation
/// 2^{−nd} Σ_{j ∈ {1, …, n2ⁿ − 1}^d} μ_C(∏{X_i > j_i / 2ⁿ}).
///
/// It equals Γ of the portfolio rounded down to the grid 2^{−n}ℕ and truncated
/// below n, so it increases to Γ(X) as n grows. Requires n > max loss.
pub fn gamma_dyadic(s: &ScenarioSet, spec: &JointRiskSpec, n: u32) -> Result<f64> {
    spec.check_portfolio(s, "gamma_dyadic")?;
    let max_loss = s.max_loss();
    if n == 0 || n >= 63 || f64::from(n) <= max_loss {
        return Err(RiskError::Truncation { level: n, max_loss });
    }
    let scale = (1u64 << n) as f64;
    let last = u64::from(n) * (1u64 << n) - 1;
    let axes = (0..s.dim())
        .map(|i| {
            let ss = s.marginal(i)?;
            let g = &spec.distortions[i];
            // S(j / 2ⁿ) is constant on runs of j between breakpoints
            let mut out = Vec::new();
            let mut start = 1u64;
            for &v in &ss.breakpoints {
                let first_at_or_above = (v * scale).ceil().max(1.0) as u64;
                let end = first_at_or_above.min(last + 1);
                if end > start {
                    out.push(Piece {
                        width: (end - start) as f64 / scale,
                        level: g.apply(ss.survival(start as f64 / scale)),
                    });
                    start = end;
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tensor_sum(&axes, |g| spec.cstar.eval_unchecked(g)))
}

/// The dyadic value with the bracket Γ(X∧n − X∧2^{−n}) ≤ value ≤
/// Γ(X∧(n − 2^{−n})) ≤ Γ(X).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicSandwich {
    pub n: u32,
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub exact: f64,
}

impl DyadicSandwich {
    /// Whether lower ≤ value ≤ upper ≤ exact up to `rel` relative tolerance.
    pub fn holds(&self, rel: f64) -> bool {
        let tol = rel * self.exact.abs().max(1.0);
        self.lower <= self.value + tol
            && self.value <= self.upper + tol
            && self.upper <= self.exact + tol
    }

    pub fn error(&self) -> f64 {
        (self.exact - self.value).abs()
    }
}

pub fn dyadic_sandwich(s: &ScenarioSet, spec: &JointRiskSpec, n: u32) -> Result<DyadicSandwich> {
    let value = gamma_dyadic(s, spec, n)?;
    let step = 1.0 / (1u64 << n) as f64;
    let level = f64::from(n);
    let lower_set = s.map_values(|_, x| x.min(level) - x.min(step))?;
    let upper_set = s.map_values(|_, x| x.min(level - step))?;
    Ok(DyadicSandwich {
        n,
        lower: gamma_survival_form(&lower_set, spec)?,
        value,
        upper: gamma_survival_form(&upper_set, spec)?,
        exact: gamma_survival_form(s, spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_spec(c: Copula) -> JointRiskSpec {
        JointRiskSpec::uniform(c, DistortionFn::Identity)
    }

    fn independent_13() -> ScenarioSet {
        ScenarioSet::from_rows(vec![
            vec![1.0, 1.0],
            vec![1.0, 3.0],
            vec![3.0, 1.0],
            vec![3.0, 3.0],
        ])
        .unwrap()
    }

    #[test]
    fn unit_portfolio_is_normalized() {
        let c = Copula::clayton(3, 2.0).unwrap();
        let spec = JointRiskSpec::uniform(c, DistortionFn::var_step(0.95).unwrap());
        let one = ScenarioSet::unit(3).unwrap();
        assert_eq!(gamma_survival_form(&one, &spec).unwrap(), 1.0);
        assert_eq!(gamma_ls_form(&one, &spec).unwrap(), 1.0);
        let dy = gamma_dyadic(&one, &spec, 4).unwrap();
        assert!((dy - 1.0).abs() <= 2.0 * 3.0 / 16.0);
    }

    #[test]
    fn independent_golden() {
        let spec = identity_spec(Copula::independence(2).unwrap());
        let s = independent_13();
        assert!((gamma_survival_form(&s, &spec).unwrap() - 4.0).abs() < 1e-12);
        assert!((gamma_ls_form(&s, &spec).unwrap() - 4.0).abs() < 1e-12);
        assert!((gamma_dyadic(&s, &spec, 6).unwrap() - 4.0).abs() < 0.2);
    }

    #[test]
    fn comonotone_golden() {
        let spec = identity_spec(Copula::comonotone(2).unwrap().survival());
        let s = ScenarioSet::from_rows(vec![vec![1.0, 1.0], vec![3.0, 3.0]]).unwrap();
        assert!((gamma_survival_form(&s, &spec).unwrap() - 5.0).abs() < 1e-12);
        assert!((gamma_ls_form(&s, &spec).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_marginal_annihilates() {
        let spec = identity_spec(Copula::gumbel(2, 2.0).unwrap());
        let s = ScenarioSet::from_rows(vec![vec![0.0, 1.0], vec![0.0, 3.0]]).unwrap();
        assert_eq!(gamma_survival_form(&s, &spec).unwrap(), 0.0);
        assert_eq!(gamma_ls_form(&s, &spec).unwrap(), 0.0);
        assert_eq!(gamma_dyadic(&s, &spec, 4).unwrap(), 0.0);
    }

    #[test]
    fn rejects_negative_losses_and_low_truncation() {
        let spec = identity_spec(Copula::independence(2).unwrap());
        let s = ScenarioSet::from_rows(vec![vec![-1.0, 1.0]]).unwrap();
        assert!(matches!(
            gamma_survival_form(&s, &spec),
            Err(RiskError::NegativeLoss { marginal: 0, .. })
        ));
        let s = independent_13();
        assert!(matches!(
            gamma_dyadic(&s, &spec, 3),
            Err(RiskError::Truncation { level: 3, .. })
        ));
        let wrong = identity_spec(Copula::independence(3).unwrap());
        assert!(matches!(
            gamma_survival_form(&s, &wrong),
            Err(RiskError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn independence_with_identity_factorizes() {
        let s = ScenarioSet::with_weights(
            vec![
                vec![0.5, 2.0, 1.0],
                vec![1.5, 0.25, 4.0],
                vec![2.0, 1.0, 0.0],
                vec![0.1, 3.0, 2.5],
            ],
            vec![0.1, 0.2, 0.3, 0.4],
        )
        .unwrap();
        let spec = identity_spec(Copula::independence(3).unwrap());
        let expect: f64 = (0..3).map(|i| s.mean(i).unwrap()).product();
        let got = gamma_survival_form(&s, &spec).unwrap();
        assert!((got - expect).abs() < 1e-12 * expect.max(1.0));
    }

    #[test]
    fn dyadic_sandwich_and_refinement() {
        let spec = JointRiskSpec::uniform(
            Copula::clayton(2, 2.0).unwrap(),
            DistortionFn::cvar_ramp(0.9).unwrap(),
        );
        let s = ScenarioSet::from_rows(vec![
            vec![0.3, 1.7],
            vec![2.2, 0.9],
            vec![1.1, 3.3],
            vec![3.4, 2.05],
        ])
        .unwrap();
        let mut prev = f64::INFINITY;
        for n in [4, 6, 8] {
            let sw = dyadic_sandwich(&s, &spec, n).unwrap();
            assert!(sw.holds(1e-9), "{sw:?}");
            assert!(sw.error() <= prev + 1e-12);
            prev = sw.error();
        }
    }

    #[test]
    fn mixture_spec_uses_survival_copula() {
        let c = Copula::comonotone(2).unwrap();
        let band = ConfidenceBand::new(0.9, 0.99).unwrap();
        let (spec, adj) =
            JointRiskSpec::mixture(&c, band, &[TailKind::Var, TailKind::Cvar], 20).unwrap();
        assert_eq!(adj.alpha_c, 0.99);
        assert_eq!(spec.distortions()[0], DistortionFn::var_step(0.99).unwrap());
        assert_eq!(spec.cstar().survival_depth(), 1);
        assert!(JointRiskSpec::mixture(&c, band, &[TailKind::Var], 20).is_err());
    }

    #[test]
    fn orthant_measure_applies_distortions() {
        let spec = JointRiskSpec::new(
            Copula::independence(2).unwrap(),
            vec![DistortionFn::Identity, DistortionFn::power(2.0).unwrap()],
        )
        .unwrap();
        assert!((spec.orthant_measure(&[0.5, 0.5]).unwrap() - 0.125).abs() < 1e-15);
        assert!(spec.orthant_measure(&[1.5, 0.5]).is_err());
    }
}
