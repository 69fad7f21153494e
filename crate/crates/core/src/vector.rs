//! Vector-valued measures H(X, C): one capital figure per marginal.

use serde::Serialize;

use crate::copula::Copula;
use crate::distortion::{AdjustedConfidence, ConfidenceBand, DistortionFn, TailKind, PROB_EPS};
use crate::error::{Result, RiskError};
use crate::portfolio::{ScenarioSet, StepSurvival};
use crate::scalar::JointRiskSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorMethod {
    Distortion,
    MixtureVarCvar,
    Mtce,
    Mtdrm,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VectorDiagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<AdjustedConfidence>,
    /// Ĉ(α, …, α) for MTCE; P(Ω) for MTDRM.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_probability: Option<f64>,
    /// Observed weight of the scenarios beyond every marginal VaR_q.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_joint_exceedance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorRiskResult {
    pub components: Vec<f64>,
    pub method: VectorMethod,
    pub diagnostics: VectorDiagnostics,
}

/// Ω selector for the tail distortion measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailRegionSpec {
    WholeSpace,
    /// Ω = ∩_j {X_j > VaR_q(X_j)}.
    JointExceedance {
        q: f64,
    },
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(RiskError::ParameterDomain {
            name: "q",
            value: q,
            constraint: "0 < q < 1",
        })
    }
}

fn check_nonnegative(s: &ScenarioSet, dim: usize, op: &'static str) -> Result<()> {
    if s.dim() != dim {
        return Err(RiskError::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    s.require_nonnegative(op)
}

/// H_i = ∫₀^∞ g_i(P(X_i > x)) dx, which equals Γ of the portfolio
/// (1, …, 1, X_i, 1, …, 1).
pub fn h_vector(s: &ScenarioSet, spec: &JointRiskSpec) -> Result<VectorRiskResult> {
    spec.check_portfolio(s, "h_vector")?;
    let components = spec
        .distortions()
        .iter()
        .enumerate()
        .map(|(i, g)| Ok(s.marginal(i)?.integrate_from(0.0, |p| g.apply(p))))
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorRiskResult {
        components,
        method: VectorMethod::Distortion,
        diagnostics: VectorDiagnostics::default(),
    })
}

/// Componentwise VaR or CVaR at the dependence-adjusted level α_c.
pub fn mixture_var_cvar(
    s: &ScenarioSet,
    c: &Copula,
    band: ConfidenceBand,
    kinds: &[TailKind],
    grid_n: usize,
) -> Result<VectorRiskResult> {
    check_nonnegative(s, c.dim(), "mixture_var_cvar")?;
    let (spec, adjusted) = JointRiskSpec::mixture(c, band, kinds, grid_n)?;
    let mut out = h_vector(s, &spec)?;
    out.method = VectorMethod::MixtureVarCvar;
    out.diagnostics.confidence = Some(adjusted);
    Ok(out)
}

/// Observed weight of the scenarios strictly beyond VaR_q in every marginal.
fn joint_exceedance(s: &ScenarioSet, q: f64) -> Result<(Vec<f64>, f64)> {
    let thresholds = (0..s.dim())
        .map(|i| s.var(i, q))
        .collect::<Result<Vec<_>>>()?;
    let p = s.joint_survival(&thresholds)?;
    Ok((thresholds, p))
}

/// Multivariate tail conditional expectation at level q.
///
/// With α = 1 − q and p = Ĉ(α, …, α), component i is ∫₀^∞ g_i(S_i(x)) dx
/// where g_i(u) = Ĉ(α, …, min(u, α), …, α) / p. Under independence this is
/// the tail mean (1/α) ∫ min(S_i, α).
pub fn mtce(s: &ScenarioSet, c: &Copula, q: f64) -> Result<VectorRiskResult> {
    check_q(q)?;
    let d = c.dim();
    check_nonnegative(s, d, "mtce")?;
    let alpha = 1.0 - q;
    let diag = vec![alpha; d];
    let p = c.survival_unchecked(&diag);
    if p <= PROB_EPS {
        return Err(RiskError::DegenerateTail(format!(
            "the survival copula of {} vanishes on the diagonal at 1 - q = {alpha} (q = {q})",
            c.label()
        )));
    }
    let components = (0..d)
        .map(|i| {
            let mut u = diag.clone();
            Ok(s.marginal(i)?.integrate_from(0.0, |level| {
                u[i] = level.min(alpha);
                (c.survival_unchecked(&u) / p).min(1.0)
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let (thresholds, observed) = joint_exceedance(s, q)?;
    Ok(VectorRiskResult {
        components,
        method: VectorMethod::Mtce,
        diagnostics: VectorDiagnostics {
            tail_probability: Some(p),
            empirical_joint_exceedance: Some(observed),
            thresholds: Some(thresholds),
            ..Default::default()
        },
    })
}

/// Multivariate tail distortion measure
/// H_i = (1 / P(Ω)) ∫₀^∞ g_i(P(Ω ∩ {X_i > x})) dx.
///
/// The copula only fixes the dimension here; the tail region is evaluated on
/// the scenarios themselves.
pub fn mtdrm(
    s: &ScenarioSet,
    c: &Copula,
    g: &[DistortionFn],
    region: TailRegionSpec,
) -> Result<VectorRiskResult> {
    let d = c.dim();
    check_nonnegative(s, d, "mtdrm")?;
    if g.len() != d {
        return Err(RiskError::DimensionMismatch {
            expected: d,
            found: g.len(),
        });
    }
    let (inside, thresholds): (Vec<bool>, Option<Vec<f64>>) = match region {
        TailRegionSpec::WholeSpace => (vec![true; s.len()], None),
        TailRegionSpec::JointExceedance { q } => {
            check_q(q)?;
            let (t, _) = joint_exceedance(s, q)?;
            let inside = s
                .rows()
                .map(|row| row.iter().zip(&t).all(|(x, v)| x > v))
                .collect();
            (inside, Some(t))
        }
    };
    let mass: f64 = s
        .weights()
        .iter()
        .zip(&inside)
        .filter(|(_, &keep)| keep)
        .map(|(w, _)| w)
        .sum();
    if mass <= 0.0 {
        let q = match region {
            TailRegionSpec::JointExceedance { q } => q,
            TailRegionSpec::WholeSpace => f64::NAN,
        };
        return Err(RiskError::DegenerateTail(format!(
            "no scenario lies beyond VaR_q in every marginal for q = {q}"
        )));
    }
    let components = (0..d)
        .map(|i| {
            if thresholds.is_none() {
                return Ok(s.marginal(i)?.integrate_from(0.0, |p| g[i].apply(p)));
            }
            let tail = StepSurvival::from_weighted(
                s.column(i)
                    .zip(s.weights().iter().copied())
                    .zip(&inside)
                    .filter(|(_, &keep)| keep)
                    .map(|(pair, _)| pair),
            );
            // P(Ω ∩ {X_i > x}) is `mass` below the first value and the
            // restricted tail sums from there on
            let mut level = mass;
            let mut left = 0.0;
            let mut acc = 0.0;
            for (&x, &t) in tail.breakpoints.iter().zip(&tail.tail) {
                if x > left {
                    acc += (x - left) * g[i].apply(level.min(1.0));
                    left = x;
                }
                level = t;
            }
            Ok(acc / mass)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorRiskResult {
        components,
        method: VectorMethod::Mtdrm,
        diagnostics: VectorDiagnostics {
            tail_probability: Some(mass),
            thresholds,
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gamma_survival_form;

    fn deciles() -> ScenarioSet {
        ScenarioSet::from_rows((1..=10).map(|k| vec![k as f64]).collect()).unwrap()
    }

    #[test]
    fn constant_portfolio() {
        let s = ScenarioSet::constant(&[2.5, 4.0]).unwrap();
        let spec = JointRiskSpec::uniform(
            Copula::gumbel(2, 3.0).unwrap(),
            DistortionFn::cvar_ramp(0.9).unwrap(),
        );
        assert_eq!(h_vector(&s, &spec).unwrap().components, vec![2.5, 4.0]);
    }

    #[test]
    fn identity_gives_means_and_step_gives_var() {
        let s = deciles();
        let spec = JointRiskSpec::uniform(Copula::independence(1).unwrap(), DistortionFn::Identity);
        assert!((h_vector(&s, &spec).unwrap().components[0] - 5.5).abs() < 1e-12);
        let spec = JointRiskSpec::uniform(
            Copula::independence(1).unwrap(),
            DistortionFn::var_step(0.85).unwrap(),
        );
        assert_eq!(h_vector(&s, &spec).unwrap().components[0], 9.0);
    }

    #[test]
    fn h_matches_embedded_gamma() {
        let s =
            ScenarioSet::from_rows(vec![vec![0.5, 2.0], vec![1.5, 0.25], vec![3.0, 1.0]]).unwrap();
        let spec = JointRiskSpec::new(
            Copula::clayton(2, 2.0).unwrap().survival(),
            vec![
                DistortionFn::cvar_ramp(0.6).unwrap(),
                DistortionFn::power(0.5).unwrap(),
            ],
        )
        .unwrap();
        let h = h_vector(&s, &spec).unwrap();
        for i in 0..2 {
            let g = gamma_survival_form(&s.embed_marginal(i).unwrap(), &spec).unwrap();
            assert!((h.components[i] - g).abs() < 1e-12);
        }
    }

    #[test]
    fn mixture_levels() {
        let rows: Vec<Vec<f64>> = (1..=100).map(|k| vec![k as f64, k as f64]).collect();
        let s = ScenarioSet::from_rows(rows).unwrap();
        let band = ConfidenceBand::new(0.9, 0.99).unwrap();
        let kinds = [TailKind::Var, TailKind::Var];
        let co = mixture_var_cvar(&s, &Copula::comonotone(2).unwrap(), band, &kinds, 200).unwrap();
        assert_eq!(co.components, vec![99.0, 99.0]);
        let counter = mixture_var_cvar(&s, &Copula::countermonotone(), band, &kinds, 200).unwrap();
        assert_eq!(counter.components, vec![90.0, 90.0]);
        assert_eq!(counter.diagnostics.confidence.unwrap().theta_c, 1.0);
    }

    #[test]
    fn mtce_independence_examples() {
        let s = ScenarioSet::from_rows(vec![
            vec![1.0, 1.0],
            vec![1.0, 3.0],
            vec![3.0, 1.0],
            vec![3.0, 3.0],
        ])
        .unwrap();
        let r = mtce(&s, &Copula::independence(2).unwrap(), 0.5).unwrap();
        for x in &r.components {
            assert!((x - 3.0).abs() < 1e-12);
        }
        assert_eq!(r.diagnostics.tail_probability, Some(0.25));
        assert_eq!(r.diagnostics.empirical_joint_exceedance, Some(0.25));
    }

    #[test]
    fn mtce_comonotone_is_tail_mean() {
        let rows: Vec<Vec<f64>> = (1..=10).map(|k| vec![k as f64, k as f64]).collect();
        let s = ScenarioSet::from_rows(rows).unwrap();
        let r = mtce(&s, &Copula::comonotone(2).unwrap(), 0.8).unwrap();
        assert!((r.components[0] - 9.5).abs() < 1e-12);
    }

    #[test]
    fn mtce_degenerate_tail() {
        let s = ScenarioSet::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            mtce(&s, &Copula::countermonotone(), 0.6),
            Err(RiskError::DegenerateTail(_))
        ));
        assert!(mtce(&s, &Copula::countermonotone(), 1.0).is_err());
    }

    #[test]
    fn mtdrm_examples() {
        let d = deciles();
        let one = Copula::independence(1).unwrap();
        let whole = TailRegionSpec::WholeSpace;
        let r = mtdrm(&d, &one, &[DistortionFn::Identity], whole).unwrap();
        assert!((r.components[0] - 5.5).abs() < 1e-12);
        let r = mtdrm(&d, &one, &[DistortionFn::var_step(0.85).unwrap()], whole).unwrap();
        assert_eq!(r.components[0], 9.0);

        let s = ScenarioSet::from_rows(vec![vec![1.0, 1.0], vec![3.0, 3.0]]).unwrap();
        let two = Copula::comonotone(2).unwrap();
        let ids = [DistortionFn::Identity, DistortionFn::Identity];
        let r = mtdrm(&s, &two, &ids, TailRegionSpec::JointExceedance { q: 0.5 }).unwrap();
        assert_eq!(r.components, vec![3.0, 3.0]);
        assert_eq!(r.diagnostics.tail_probability, Some(0.5));
    }

    #[test]
    fn mtdrm_empty_region() {
        let s = ScenarioSet::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let ids = [DistortionFn::Identity, DistortionFn::Identity];
        let err = mtdrm(
            &s,
            &Copula::independence(2).unwrap(),
            &ids,
            TailRegionSpec::JointExceedance { q: 0.5 },
        )
        .unwrap_err();
        assert!(err.to_string().contains("q = 0.5"));
    }
}
