//! Copula-based multivariate distortion joint risk measures on discrete
//! scenario data.
//!
//! A portfolio is a [`ScenarioSet`]; a measure is a [`JointRiskSpec`] pairing a
//! copula C* with one [`DistortionFn`] per marginal. The scalar measure Γ is
//! available in survival, Lebesgue–Stieltjes and dyadic form, the vector
//! measures H in [`vector`], and signed two-dimensional losses in [`signed`].

pub mod axioms;
pub mod copula;
pub mod distortion;
pub mod error;
pub mod portfolio;
pub mod scalar;
pub mod signed;
pub mod vector;

pub use axioms::{axiom_suite, Axiom, AxiomOutcome, AxiomReport, Witness};
pub use copula::{
    default_grid_n, empirical_copula, fit_archimedean, frechet_bounds, frechet_distances,
    gof_distance, kendall_tau, kendall_tau_matrix, ArchimedeanFit, Copula, Family, FitSummary,
    FrechetDistances, DEFAULT_GOF_THRESHOLD,
};
pub use distortion::{alpha_c, AdjustedConfidence, ConfidenceBand, DistortionFn, TailKind};
pub use error::{Result, RiskError};
pub use portfolio::{ScenarioSet, ScenarioSummary, StepSurvival};
pub use scalar::{
    dyadic_sandwich, gamma_dyadic, gamma_ls_form, gamma_survival_form, DyadicSandwich,
    JointRiskSpec,
};
pub use signed::gamma_signed_2d;
pub use vector::{
    h_vector, mixture_var_cvar, mtce, mtdrm, TailRegionSpec, VectorDiagnostics, VectorMethod,
    VectorRiskResult,
};
