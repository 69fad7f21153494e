//! d-dimensional copulas: pointwise evaluation, survival copulas, box
//! increments, Fréchet–Hoeffding bounds, empirical copulas and fitting.
//!
//! All copulas are immutable values. Evaluation is pure and cheap to share
//! between threads; empirical and survival copulas hold their data behind an
//! [`Arc`].

mod empirical;
mod fit;
mod frechet;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Result, RiskError};

pub use empirical::{empirical_copula, EmpiricalCopula};
pub use fit::{
    fit_archimedean, gof_distance, kendall_tau, kendall_tau_matrix, ArchimedeanFit, FitSummary,
    DEFAULT_GOF_THRESHOLD,
};
pub use frechet::{default_grid_n, frechet_bounds, frechet_distances, FrechetDistances};

/// Below this magnitude a Frank parameter is treated as the independence limit.
pub const FRANK_INDEPENDENCE_EPS: f64 = 1e-10;

/// Copula families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Independence,
    Comonotone,
    /// The Fréchet–Hoeffding lower bound; a copula only in dimension 2.
    Countermonotone,
    Clayton,
    Gumbel,
    Frank,
    Empirical,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Independence => "independence",
            Family::Comonotone => "comonotone",
            Family::Countermonotone => "countermonotone",
            Family::Clayton => "clayton",
            Family::Gumbel => "gumbel",
            Family::Frank => "frank",
            Family::Empirical => "empirical",
        }
    }

    /// Whether the family is one of the one-parameter Archimedean families.
    pub fn is_archimedean(self) -> bool {
        matches!(self, Family::Clayton | Family::Gumbel | Family::Frank)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "independence" | "product" | "pi" => Ok(Family::Independence),
            "comonotone" | "min" | "upper" => Ok(Family::Comonotone),
            "countermonotone" | "lower" => Ok(Family::Countermonotone),
            "clayton" => Ok(Family::Clayton),
            "gumbel" => Ok(Family::Gumbel),
            "frank" => Ok(Family::Frank),
            "empirical" => Ok(Family::Empirical),
            other => Err(format!("unknown copula family `{other}`")),
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Independence,
    Comonotone,
    Countermonotone,
    Clayton(f64),
    Gumbel(f64),
    Frank(f64),
    Empirical(Arc<EmpiricalCopula>),
    Survival(Arc<Copula>),
}

/// A d-dimensional copula.
#[derive(Debug, Clone)]
pub struct Copula {
    dim: usize,
    kind: Kind,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(RiskError::UnsupportedDimension { op: "copula", dim });
    }
    Ok(())
}

impl Copula {
    /// The product copula Π(u) = u₁⋯u_d.
    pub fn independence(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: Kind::Independence,
        })
    }

    /// The upper Fréchet–Hoeffding bound M(u) = min uᵢ.
    pub fn comonotone(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            kind: Kind::Comonotone,
        })
    }

    /// The bivariate lower bound W(u, v) = max(u + v − 1, 0).
    pub fn countermonotone() -> Self {
        Self {
            dim: 2,
            kind: Kind::Countermonotone,
        }
    }

    pub fn clayton(dim: usize, theta: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(theta.is_finite() && theta > 0.0) {
            return Err(RiskError::ParameterDomain {
                name: "clayton theta",
                value: theta,
                constraint: "theta > 0",
            });
        }
        Ok(Self {
            dim,
            kind: Kind::Clayton(theta),
        })
    }

    pub fn gumbel(dim: usize, theta: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(theta.is_finite() && theta >= 1.0) {
            return Err(RiskError::ParameterDomain {
                name: "gumbel theta",
                value: theta,
                constraint: "theta >= 1",
            });
        }
        Ok(Self {
            dim,
            kind: Kind::Gumbel(theta),
        })
    }

    /// Frank copula. Negative parameters are only d-increasing for d = 2.
    pub fn frank(dim: usize, theta: f64) -> Result<Self> {
        check_dim(dim)?;
        if !theta.is_finite() || theta == 0.0 {
            return Err(RiskError::ParameterDomain {
                name: "frank theta",
                value: theta,
                constraint: "theta != 0",
            });
        }
        if dim > 2 && theta < 0.0 {
            return Err(RiskError::ParameterDomain {
                name: "frank theta",
                value: theta,
                constraint: "theta > 0 when dimension > 2",
            });
        }
        Ok(Self {
            dim,
            kind: Kind::Frank(theta),
        })
    }

    /// Builds a parametric copula by family name. `param` is required for the
    /// Archimedean families and ignored otherwise.
    pub fn parametric(family: Family, dim: usize, param: Option<f64>) -> Result<Self> {
        let need = |name: &'static str| {
            param.ok_or(RiskError::ParameterDomain {
                name,
                value: f64::NAN,
                constraint: "a parameter is required",
            })
        };
        match family {
            Family::Independence => Self::independence(dim),
            Family::Comonotone => Self::comonotone(dim),
            Family::Countermonotone => {
                if dim != 2 {
                    return Err(RiskError::UnsupportedDimension {
                        op: "countermonotone copula",
                        dim,
                    });
                }
                Ok(Self::countermonotone())
            }
            Family::Clayton => Self::clayton(dim, need("clayton theta")?),
            Family::Gumbel => Self::gumbel(dim, need("gumbel theta")?),
            Family::Frank => Self::frank(dim, need("frank theta")?),
            Family::Empirical => Err(RiskError::Data(
                "an empirical copula is built from scenario data".into(),
            )),
        }
    }

    pub(crate) fn from_empirical(e: EmpiricalCopula) -> Self {
        Self {
            dim: e.dim(),
            kind: Kind::Empirical(Arc::new(e)),
        }
    }

    /// The survival copula Ĉ, defined by the inclusion–exclusion increment of
    /// this copula over the box [1 − u, 1].
    pub fn survival(&self) -> Copula {
        Copula {
            dim: self.dim,
            kind: Kind::Survival(Arc::new(self.clone())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Family of the underlying copula; for a survival copula, the family of
    /// its base.
    pub fn family(&self) -> Family {
        match &self.kind {
            Kind::Independence => Family::Independence,
            Kind::Comonotone => Family::Comonotone,
            Kind::Countermonotone => Family::Countermonotone,
            Kind::Clayton(_) => Family::Clayton,
            Kind::Gumbel(_) => Family::Gumbel,
            Kind::Frank(_) => Family::Frank,
            Kind::Empirical(_) => Family::Empirical,
            Kind::Survival(base) => base.family(),
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match &self.kind {
            Kind::Clayton(t) | Kind::Gumbel(t) | Kind::Frank(t) => Some(*t),
            Kind::Survival(base) => base.parameter(),
            _ => None,
        }
    }

    /// Number of survival wrappings (0 for a plain copula).
    pub fn survival_depth(&self) -> usize {
        match &self.kind {
            Kind::Survival(base) => 1 + base.survival_depth(),
            _ => 0,
        }
    }

    pub fn as_empirical(&self) -> Option<&EmpiricalCopula> {
        match &self.kind {
            Kind::Empirical(e) => Some(e),
            _ => None,
        }
    }

    fn is_data_driven(&self) -> bool {
        self.family() == Family::Empirical
    }

    /// Short human-readable label such as `survival(clayton(2))`.
    pub fn label(&self) -> String {
        match &self.kind {
            Kind::Clayton(t) => format!("clayton({t})"),
            Kind::Gumbel(t) => format!("gumbel({t})"),
            Kind::Frank(t) => format!("frank({t})"),
            Kind::Empirical(e) => format!("empirical(m={})", e.len()),
            Kind::Survival(base) => format!("survival({})", base.label()),
            _ => self.family().name().to_string(),
        }
    }

    /// C(u) for u ∈ [0, 1]^d.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim,
                found: u.len(),
            });
        }
        for &x in u {
            check_unit("copula argument", x)?;
        }
        Ok(self.eval_unchecked(u))
    }

    /// Ĉ(u), the survival copula evaluated at u.
    pub fn survival_eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(RiskError::DimensionMismatch {
                expected: self.dim,
                found: u.len(),
            });
        }
        for &x in u {
            check_unit("copula argument", x)?;
        }
        Ok(self.survival_unchecked(u))
    }

    /// The 2^d-term alternating sum Δ_a^b C, i.e. the C-volume of [a, b].
    pub fn box_increment(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        for v in [a, b] {
            if v.len() != self.dim {
                return Err(RiskError::DimensionMismatch {
                    expected: self.dim,
                    found: v.len(),
                });
            }
            for &x in v {
                check_unit("box corner", x)?;
            }
        }
        if let Some(coord) = (0..self.dim).find(|&i| a[i] > b[i]) {
            return Err(RiskError::Ordering {
                coord,
                lower: a[coord],
                upper: b[coord],
            });
        }
        let mut vertex = vec![0.0; self.dim];
        let mut total = 0.0;
        for mask in 0u64..(1u64 << self.dim) {
            let mut lower_count = 0;
            for (i, v) in vertex.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *v = b[i];
                } else {
                    *v = a[i];
                    lower_count += 1;
                }
            }
            let term = self.eval_unchecked(&vertex);
            if lower_count % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        Ok(total)
    }

    /// Evaluation without argument checks. Callers guarantee `u.len() == dim`
    /// and every coordinate in [0, 1].
    pub(crate) fn eval_unchecked(&self, u: &[f64]) -> f64 {
        // Grounded everywhere; parametric copulas also get exact uniform
        // margins. Empirical copulas keep their raw rank-count margins.
        let mut free = None;
        let mut free_count = 0;
        for (i, &x) in u.iter().enumerate() {
            if x <= 0.0 {
                return 0.0;
            }
            if x < 1.0 {
                free_count += 1;
                free = Some(i);
            }
        }
        match (free_count, free) {
            (0, _) => return 1.0,
            (1, Some(i)) if !self.is_data_driven() => return u[i],
            _ => {}
        }
        let v = match &self.kind {
            Kind::Independence => u.iter().product(),
            Kind::Comonotone => u.iter().copied().fold(1.0, f64::min),
            Kind::Countermonotone => (u[0] + u[1] - 1.0).max(0.0),
            Kind::Clayton(theta) => clayton(u, *theta),
            Kind::Gumbel(theta) => gumbel(u, *theta),
            Kind::Frank(theta) => frank(u, *theta),
            Kind::Empirical(e) => e.eval(u),
            Kind::Survival(base) => base.survival_unchecked(u),
        };
        v.clamp(0.0, 1.0)
    }

    pub(crate) fn survival_unchecked(&self, u: &[f64]) -> f64 {
        let d = self.dim;
        let mut vertex = vec![1.0; d];
        let mut total = 0.0;
        for mask in 0u64..(1u64 << d) {
            let mut flipped = 0;
            for (i, v) in vertex.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *v = 1.0 - u[i];
                    flipped += 1;
                } else {
                    *v = 1.0;
                }
            }
            let term = self.eval_unchecked(&vertex);
            if flipped % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total.clamp(0.0, 1.0)
    }
}

fn clayton(u: &[f64], theta: f64) -> f64 {
    // Factor out the smallest coordinate so that no power overflows:
    // C(u) = m · (Σ (m/uᵢ)^θ − (d−1) m^θ)^(−1/θ).
    let m = u.iter().copied().fold(1.0, f64::min);
    let d = u.len() as f64;
    let s: f64 = u.iter().map(|&x| (m / x).powf(theta)).sum::<f64>() - (d - 1.0) * m.powf(theta);
    if s <= 0.0 {
        return 0.0;
    }
    m * s.powf(-1.0 / theta)
}

fn gumbel(u: &[f64], theta: f64) -> f64 {
    let s: f64 = u.iter().map(|&x| (-x.ln()).powf(theta)).sum();
    (-s.powf(1.0 / theta)).exp()
}

fn frank(u: &[f64], theta: f64) -> f64 {
    if theta.abs() < FRANK_INDEPENDENCE_EPS {
        return u.iter().product();
    }
    let denom = (-theta).exp_m1();
    let mut ratio = 1.0;
    for (k, &x) in u.iter().enumerate() {
        ratio *= (-theta * x).exp_m1();
        if k > 0 {
            ratio /= denom;
        }
    }
    -(ratio.ln_1p()) / theta
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_families(d: usize) -> Vec<Copula> {
        let mut v = vec![
            Copula::independence(d).unwrap(),
            Copula::comonotone(d).unwrap(),
            Copula::clayton(d, 2.0).unwrap(),
            Copula::gumbel(d, 2.0).unwrap(),
            Copula::frank(d, 5.0).unwrap(),
        ];
        if d == 2 {
            v.push(Copula::countermonotone());
            v.push(Copula::frank(2, -4.0).unwrap());
        }
        v
    }

    #[test]
    fn independence_is_product() {
        let c = Copula::independence(2).unwrap();
        assert_eq!(c.eval(&[0.5, 0.5]).unwrap(), 0.25);
    }

    #[test]
    fn clayton_closed_form() {
        let c = Copula::clayton(2, 2.0).unwrap();
        let expected = 7f64.powf(-0.5);
        assert!((c.eval(&[0.5, 0.5]).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 0.377_964_473_009_227_2).abs() < 1e-15);
    }

    #[test]
    fn uniform_margins_are_exact() {
        for d in 1..=4 {
            for c in all_families(d) {
                for i in 0..d {
                    let mut u = vec![1.0; d];
                    u[i] = 0.7;
                    assert_eq!(c.eval(&u).unwrap(), 0.7, "{}", c.label());
                    assert_eq!(c.survival_eval(&u).unwrap(), 0.7, "{}", c.label());
                }
            }
        }
    }

    #[test]
    fn grounded() {
        for c in all_families(3) {
            assert_eq!(c.eval(&[0.0, 0.4, 0.9]).unwrap(), 0.0);
            assert_eq!(c.survival_eval(&[0.3, 0.0, 0.9]).unwrap(), 0.0);
        }
    }

    #[test]
    fn survival_examples() {
        let pi = Copula::independence(2).unwrap();
        assert!((pi.survival_eval(&[0.3, 0.4]).unwrap() - 0.12).abs() < 1e-15);
        let m = Copula::comonotone(2).unwrap();
        assert!((m.survival_eval(&[0.3, 0.4]).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn box_increment_examples() {
        let pi = Copula::independence(2).unwrap();
        assert_eq!(pi.box_increment(&[0.0, 0.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert!((pi.box_increment(&[0.2, 0.2], &[0.6, 0.7]).unwrap() - 0.2).abs() < 1e-15);
        for c in all_families(2) {
            assert_eq!(c.box_increment(&[0.3, 0.6], &[0.3, 0.6]).unwrap(), 0.0);
        }
    }

    #[test]
    fn box_increment_rejects_unordered_corners() {
        let pi = Copula::independence(2).unwrap();
        let err = pi.box_increment(&[0.5, 0.2], &[0.4, 0.9]).unwrap_err();
        assert!(matches!(err, RiskError::Ordering { coord: 0, .. }));
    }

    #[test]
    fn parameter_domains() {
        assert!(Copula::clayton(2, 0.0).is_err());
        assert!(Copula::clayton(2, -1.0).is_err());
        assert!(Copula::gumbel(2, 0.5).is_err());
        assert!(Copula::frank(2, 0.0).is_err());
        assert!(Copula::frank(3, -1.0).is_err());
        assert!(Copula::parametric(Family::Countermonotone, 3, None).is_err());
        assert!(Copula::independence(0).is_err());
    }

    #[test]
    fn dimension_and_domain_errors() {
        let c = Copula::gumbel(3, 1.5).unwrap();
        assert!(matches!(
            c.eval(&[0.5, 0.5]),
            Err(RiskError::DimensionMismatch {
                expected: 3,
                found: 2
            })
        ));
        assert!(matches!(
            c.eval(&[0.5, 1.5, 0.5]),
            Err(RiskError::OutOfUnitInterval { .. })
        ));
    }

    #[test]
    fn frank_small_theta_is_independence() {
        let f = Copula::frank(2, 1e-12).unwrap();
        assert_eq!(f.eval(&[0.3, 0.6]).unwrap(), 0.3 * 0.6);
        // and the limit is continuous from slightly larger parameters
        let g = Copula::frank(2, 1e-6).unwrap();
        assert!((g.eval(&[0.3, 0.6]).unwrap() - 0.18).abs() < 1e-6);
    }

    #[test]
    fn gumbel_one_is_independence() {
        let g = Copula::gumbel(3, 1.0).unwrap();
        let u = [0.2, 0.5, 0.9];
        assert!((g.eval(&u).unwrap() - 0.09).abs() < 1e-15);
    }

    #[test]
    fn clayton_large_theta_stays_finite() {
        let c = Copula::clayton(2, 5000.0).unwrap();
        let v = c.eval(&[0.3, 0.8]).unwrap();
        assert!((v - 0.3).abs() < 1e-3);
    }

    #[test]
    fn survival_of_survival_is_base() {
        for c in all_families(3) {
            let twice = c.survival().survival();
            assert_eq!(twice.survival_depth(), 2);
            for u in [[0.1, 0.5, 0.9], [0.33, 0.66, 0.25], [0.8, 0.8, 0.8]] {
                let a = c.eval(&u).unwrap();
                let b = twice.eval(&u).unwrap();
                assert!((a - b).abs() < 1e-12, "{}: {a} vs {b}", c.label());
            }
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!("Clayton".parse::<Family>().unwrap(), Family::Clayton);
        assert!("gaussian".parse::<Family>().is_err());
    }
}
