//! Γ for signed losses in dimension 2, by splitting the plane into quadrants.

use crate::error::{Result, RiskError};
use crate::portfolio::ScenarioSet;
use crate::scalar::{axis_pieces, tensor_sum, JointRiskSpec};

/// Γ(X, C) for a two-dimensional portfolio whose losses may be negative.
///
/// With A_i(x) = {X_i > x} and μ(A_1 × A_2) = C*(g_1(P(A_1)), g_2(P(A_2))):
///
/// ```text
/// Γ = ∫_{x1>0} ∫_{x2>0} μ(A1×A2)
///   + ∫_{x1<0} ∫_{x2>0} [μ(A1×A2) − μ(Ω×A2)]
///   + ∫_{x1>0} ∫_{x2<0} [μ(A1×A2) − μ(A1×Ω)]
///   + ∫_{x1<0} ∫_{x2<0} [μ(A1×A2) − μ(Ω×A2) − μ(A1×Ω) + 1]
/// ```
///
/// Each integrand vanishes below the smallest loss and above the largest, so
/// every quadrant is an exact finite cell sum. On nonnegative data the three
/// correction quadrants are exactly zero and the result is bit-identical to
/// [`crate::gamma_survival_form`].
pub fn gamma_signed_2d(s: &ScenarioSet, spec: &JointRiskSpec) -> Result<f64> {
    if s.dim() != 2 {
        return Err(RiskError::UnsupportedDimension {
            op: "gamma_signed_2d",
            dim: s.dim(),
        });
    }
    if spec.dim() != 2 {
        return Err(RiskError::DimensionMismatch {
            expected: 2,
            found: spec.dim(),
        });
    }
    let mut pos = Vec::with_capacity(2);
    let mut neg = Vec::with_capacity(2);
    for (i, g) in spec.distortions().iter().enumerate() {
        let ss = s.marginal(i)?;
        let lo = ss.breakpoints[0].min(0.0);
        let hi = ss.breakpoints[ss.len() - 1].max(0.0);
        pos.push(axis_pieces(&ss, g, 0.0, hi));
        neg.push(axis_pieces(&ss, g, lo, 0.0));
    }
    let c = spec.cstar();
    let g_omega: Vec<f64> = spec
        .distortions()
        .iter()
        .map(|g| g.eval(1.0))
        .collect::<Result<_>>()?;
    let mu = |a: f64, b: f64| c.eval_unchecked(&[a, b]);

    let upper_right = tensor_sum(&[pos[0].clone(), pos[1].clone()], |v| mu(v[0], v[1]));
    let upper_left = tensor_sum(&[neg[0].clone(), pos[1].clone()], |v| {
        mu(v[0], v[1]) - mu(g_omega[0], v[1])
    });
    let lower_right = tensor_sum(&[pos[0].clone(), neg[1].clone()], |v| {
        mu(v[0], v[1]) - mu(v[0], g_omega[1])
    });
    let lower_left = tensor_sum(&[neg[0].clone(), neg[1].clone()], |v| {
        mu(v[0], v[1]) - mu(g_omega[0], v[1]) - mu(v[0], g_omega[1]) + 1.0
    });
    Ok(upper_right + upper_left + lower_right + lower_left)
}
