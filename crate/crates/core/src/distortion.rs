//! Distortion functions g: [0, 1] → [0, 1], their right-continuous inverses,
//! and the dependence-adjusted confidence level α_c.

use serde::Serialize;

use crate::copula::{frechet_distances, Copula};
use crate::error::{check_unit, Result, RiskError};

/// Slack used when a probability is compared against a step threshold such as
/// 1 − α. Probabilities built from sums of scenario weights carry rounding
/// error of this order, and a probability that equals the threshold up to
/// rounding is treated as equal.
pub const PROB_EPS: f64 = 1e-12;

/// A distortion function.
///
/// `VarStep` and `CvarRamp` are the value-at-risk and conditional value-at-risk
/// distortions at level α; `Power` (g(u) = u^k) and `PiecewiseLinear` are
/// extensions for testing and experimentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionFn {
    Identity,
    /// 0 on [0, 1 − α], 1 on (1 − α, 1].
    VarStep {
        alpha: f64,
    },
    /// u / (1 − α) on [0, 1 − α], 1 above.
    CvarRamp {
        alpha: f64,
    },
    Power {
        k: f64,
    },
    /// Linear interpolation through sorted knots (x, g(x)) from (0, 0) to (1, 1).
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
}

impl DistortionFn {
    pub fn var_step(alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(Self::VarStep { alpha })
    }

    pub fn cvar_ramp(alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(Self::CvarRamp { alpha })
    }

    pub fn power(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(RiskError::ParameterDomain {
                name: "power exponent",
                value: k,
                constraint: "k > 0",
            });
        }
        Ok(Self::Power { k })
    }

    /// A validated piecewise-linear distortion: knots strictly increasing in x,
    /// non-decreasing in g, starting at (0, 0) and ending at (1, 1).
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let g = Self::piecewise_linear_unvalidated(knots)?;
        let Self::PiecewiseLinear { knots } = &g else {
            unreachable!()
        };
        if let Some(w) = knots.windows(2).find(|w| w[1].1 < w[0].1) {
            return Err(RiskError::ParameterDomain {
                name: "distortion knot",
                value: w[1].1,
                constraint: "distortion values must be non-decreasing",
            });
        }
        Ok(g)
    }

    /// Like [`DistortionFn::piecewise_linear`] but without the monotonicity
    /// check. Non-monotone distortions are not valid risk distortions; this
    /// exists to build negative controls for the axiom checks.
    pub fn piecewise_linear_unvalidated(knots: Vec<(f64, f64)>) -> Result<Self> {
        let bad = |value: f64, constraint: &'static str| RiskError::ParameterDomain {
            name: "distortion knot",
            value,
            constraint,
        };
        match (knots.first(), knots.last()) {
            (Some(&(0.0, 0.0)), Some(&(1.0, 1.0))) if knots.len() >= 2 => {}
            _ => return Err(bad(f64::NAN, "knots must run from (0, 0) to (1, 1)")),
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(bad(w[1].0, "knot abscissae must be strictly increasing"));
            }
        }
        for &(_, y) in &knots {
            check_unit("distortion knot value", y)?;
        }
        Ok(Self::PiecewiseLinear { knots })
    }

    /// g(u); errors when u ∉ [0, 1].
    pub fn eval(&self, u: f64) -> Result<f64> {
        check_unit("distortion argument", u)?;
        Ok(self.apply(u))
    }

    /// g(u) for u already known to be in [0, 1].
    pub(crate) fn apply(&self, u: f64) -> f64 {
        match self {
            Self::Identity => u,
            Self::VarStep { alpha } => {
                if u <= 1.0 - alpha + PROB_EPS {
                    0.0
                } else {
                    1.0
                }
            }
            Self::CvarRamp { alpha } => {
                let tail = 1.0 - alpha;
                if u <= tail {
                    (u / tail).min(1.0)
                } else {
                    1.0
                }
            }
            Self::Power { k } => u.powf(*k),
            Self::PiecewiseLinear { knots } => {
                let j = knots.partition_point(|&(x, _)| x <= u);
                if j >= knots.len() {
                    return knots[knots.len() - 1].1;
                }
                let (x0, y0) = knots[j - 1];
                let (x1, y1) = knots[j];
                y0 + (y1 - y0) * (u - x0) / (x1 - x0)
            }
        }
    }

    /// Right-continuous inverse g⁻¹(v) = inf{x : g(x) > v}, pinned to 0 at
    /// v = 0 and to 1 at v = 1.
    pub fn right_cont_inverse(&self, v: f64) -> Result<f64> {
        check_unit("distortion inverse argument", v)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        if v == 1.0 {
            return Ok(1.0);
        }
        Ok(match self {
            Self::Identity => v,
            Self::VarStep { alpha } => 1.0 - alpha,
            Self::CvarRamp { alpha } => v * (1.0 - alpha),
            Self::Power { k } => v.powf(1.0 / k),
            Self::PiecewiseLinear { knots } => {
                // first segment whose right end exceeds v
                let mut out = 1.0;
                for w in knots.windows(2) {
                    let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                    if y0 > v {
                        out = x0;
                        break;
                    }
                    if y1 > v {
                        out = x0 + (x1 - x0) * (v - y0) / (y1 - y0);
                        break;
                    }
                }
                out
            }
        })
    }

    /// Short label such as `var(0.95)`.
    pub fn label(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::VarStep { alpha } => format!("var({alpha})"),
            Self::CvarRamp { alpha } => format!("cvar({alpha})"),
            Self::Power { k } => format!("power({k})"),
            Self::PiecewiseLinear { knots } => format!("piecewise({} knots)", knots.len()),
        }
    }
}

fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(RiskError::ParameterDomain {
            name: "confidence level",
            value: alpha,
            constraint: "0 < alpha < 1",
        })
    }
}

/// Which of the two confidence-level distortions a component uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TailKind {
    Var,
    Cvar,
}

impl TailKind {
    pub fn distortion(self, alpha: f64) -> Result<DistortionFn> {
        match self {
            Self::Var => DistortionFn::var_step(alpha),
            Self::Cvar => DistortionFn::cvar_ramp(alpha),
        }
    }
}

/// A tolerance interval of confidence levels 0 < α₁ ≤ α₂ < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceBand {
    lower: f64,
    upper: f64,
}

impl ConfidenceBand {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        check_level(lower)?;
        check_level(upper)?;
        if lower > upper {
            return Err(RiskError::ParameterDomain {
                name: "confidence band lower level",
                value: lower,
                constraint: "alpha1 <= alpha2",
            });
        }
        Ok(Self { lower, upper })
    }

    /// The degenerate band (α, α).
    pub fn point(alpha: f64) -> Result<Self> {
        Self::new(alpha, alpha)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// θ α₁ + (1 − θ) α₂.
    pub fn blend(&self, theta: f64) -> f64 {
        theta * self.lower + (1.0 - theta) * self.upper
    }
}

/// The confidence level adjusted to the dependence of a copula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjustedConfidence {
    pub alpha_c: f64,
    pub theta_c: f64,
    /// `None` in dimension 1, where θ_c = 0 by definition.
    pub d_ul: Option<f64>,
    pub d_uc: Option<f64>,
    pub grid_n: usize,
}

/// α_c = θ_c α₁ + (1 − θ_c) α₂ with θ_c = d_uc / d_ul (0 when d = 1).
///
/// Close to the upper Fréchet bound (comonotone) the upper level is used;
/// close to the lower bound the lower level.
pub fn alpha_c(c: &Copula, band: ConfidenceBand, grid_n: usize) -> Result<AdjustedConfidence> {
    if c.dim() == 1 {
        return Ok(AdjustedConfidence {
            alpha_c: band.blend(0.0),
            theta_c: 0.0,
            d_ul: None,
            d_uc: None,
            grid_n,
        });
    }
    let fd = frechet_distances(c, grid_n)?;
    let theta = (fd.d_uc / fd.d_ul).clamp(0.0, 1.0);
    Ok(AdjustedConfidence {
        alpha_c: band.blend(theta).clamp(band.lower, band.upper),
        theta_c: theta,
        d_ul: Some(fd.d_ul),
        d_uc: Some(fd.d_uc),
        grid_n,
    })
}
