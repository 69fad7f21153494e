//! The JSON report written by every command.

use std::io::Write;
use std::path::Path;

use jointrisk::{
    AdjustedConfidence, AxiomReport, DistortionFn, DyadicSandwich, Family, FitSummary,
    FrechetDistances, ScenarioSummary, TailKind, TailRegionSpec, VectorRiskResult,
};
use serde::Serialize;

use crate::config::{Measure, RunConfig};
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub schema_version: u32,
    pub command: Measure,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<ScenarioReport>,
    pub copula: CopulaDiagnostics,
    pub result: MeasureResult,
    pub warnings: Vec<String>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    #[serde(flatten)]
    pub summary: ScenarioSummary,
    /// Per-marginal VaR and CVaR at both ends of the confidence band.
    pub tails: Vec<MarginalTail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginalTail {
    pub name: String,
    pub var_lower: f64,
    pub var_upper: f64,
    pub cvar_lower: f64,
    pub cvar_upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CopulaDiagnostics {
    pub family: Family,
    pub label: String,
    pub dim: usize,
    pub parameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    /// Cramér–von Mises grid distance between the empirical copula of the
    /// data and the declared one.
    pub gof_distance: Option<f64>,
    pub gof_threshold: f64,
    pub matched: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<AdjustedConfidence>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "measure", rename_all = "kebab-case")]
pub enum MeasureResult {
    Scalar {
        distortions: Vec<DistortionFn>,
        survival_form: f64,
        ls_form: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        dyadic: Option<DyadicSandwich>,
    },
    Vector {
        names: Vec<String>,
        distortions: Vec<DistortionFn>,
        vector: VectorRiskResult,
    },
    Mixture {
        names: Vec<String>,
        kinds: Vec<TailKind>,
        vector: VectorRiskResult,
    },
    Mtce {
        names: Vec<String>,
        q: f64,
        vector: VectorRiskResult,
    },
    Mtdrm {
        names: Vec<String>,
        region: TailRegionSpec,
        distortions: Vec<DistortionFn>,
        vector: VectorRiskResult,
    },
    Signed2d {
        distortions: Vec<DistortionFn>,
        value: f64,
    },
    Axioms {
        all_passed: bool,
        runs: Vec<AxiomRun>,
    },
    CopulaFit {
        kendall_tau: Vec<Vec<f64>>,
        candidates: Vec<FitCandidate>,
        best: Option<Family>,
    },
    CopulaDistance {
        frechet: FrechetDistances,
        confidence: AdjustedConfidence,
    },
}

/// One axiom suite run for the mixed VaR/CVaR family with a single tail kind.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomRun {
    pub kind: TailKind,
    pub report: AxiomReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitCandidate {
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gof_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    /// The only field that varies between identical runs.
    pub generated_at_unix: u64,
}

impl RiskReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Validation(format!("cannot serialize report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    /// Writes to `out`, or to standard output when no path is given.
    pub fn emit(&self, out: Option<&Path>) -> Result<()> {
        let json = self.to_json()?;
        match out {
            Some(path) => std::fs::write(path, json)
                .map_err(|e| CliError::Validation(format!("--out {}: {e}", path.display()))),
            None => std::io::stdout()
                .lock()
                .write_all(json.as_bytes())
                .map_err(|e| CliError::Validation(format!("standard output: {e}"))),
        }
    }
}

/// Drops the timestamp line so two reports can be compared byte for byte.
pub fn without_timestamp(json: &str) -> String {
    json.lines()
        .filter(|l| !l.trim_start().starts_with("\"generated_at_unix\""))
        .collect::<Vec<_>>()
        .join("\n")
}
