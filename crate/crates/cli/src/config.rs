//! Command-line flags and their validated form.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use jointrisk::{ConfidenceBand, Family, DEFAULT_GOF_THRESHOLD};
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "risk",
    version,
    about = "Copula-based multivariate distortion joint risk measures on scenario data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar joint risk measure in survival and Lebesgue-Stieltjes form
    Scalar(Options),
    /// Vector-valued measure, one figure per marginal
    Vector(Options),
    /// Componentwise VaR/CVaR at the dependence-adjusted confidence level
    Mixture(Options),
    /// Multivariate tail conditional expectation at level --q
    Mtce(Options),
    /// Multivariate tail distortion measure over --region
    Mtdrm(Options),
    /// Scalar measure for signed losses in two dimensions
    Signed2d(Options),
    /// Seeded property checks of the six axioms
    Axioms(Options),
    /// Kendall tau and Archimedean fits of the data
    CopulaFit(Options),
    /// Frechet distances and the adjusted confidence level of a copula
    CopulaDistance(Options),
}

impl Command {
    pub fn split(self) -> (Measure, Options) {
        match self {
            Command::Scalar(o) => (Measure::Scalar, o),
            Command::Vector(o) => (Measure::Vector, o),
            Command::Mixture(o) => (Measure::Mixture, o),
            Command::Mtce(o) => (Measure::Mtce, o),
            Command::Mtdrm(o) => (Measure::Mtdrm, o),
            Command::Signed2d(o) => (Measure::Signed2d, o),
            Command::Axioms(o) => (Measure::Axioms, o),
            Command::CopulaFit(o) => (Measure::CopulaFit, o),
            Command::CopulaDistance(o) => (Measure::CopulaDistance, o),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Scenario CSV: header row, one column per asset, optional final "weight" column
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// independence | comonotone | countermonotone | clayton:θ | gumbel:θ | frank:θ | fit:<family> | empirical
    #[arg(long, default_value = "empirical")]
    pub copula: String,
    /// Confidence band α1,α2
    #[arg(long, default_value = "0.95,0.99")]
    pub band: String,
    /// Tail level for mtce and joint-exceedance regions
    #[arg(long, default_value_t = 0.95)]
    pub q: f64,
    /// var | cvar | identity | power:k; repeat once per component or give one for all
    #[arg(long = "distortion")]
    pub distortions: Vec<String>,
    /// Grid resolution for copula distances (default depends on dimension)
    #[arg(long)]
    pub grid_n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// warn | assert | assert:<threshold>
    #[arg(long = "match", default_value = "warn")]
    pub match_policy: String,
    /// Write the JSON report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of random instances for the axiom checks
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Tail region for mtdrm: whole | joint
    #[arg(long, default_value = "whole")]
    pub region: String,
    /// Dimension when no --input is given
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Also report the dyadic approximation at this level (scalar only)
    #[arg(long)]
    pub dyadic_n: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Scalar,
    Vector,
    Mixture,
    Mtce,
    Mtdrm,
    Signed2d,
    Axioms,
    CopulaFit,
    CopulaDistance,
}

impl Measure {
    /// Whether the measure needs scenario data.
    pub fn needs_input(self) -> bool {
        !matches!(self, Measure::Axioms | Measure::CopulaDistance)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CopulaChoice {
    Parametric { family: Family, theta: Option<f64> },
    Fit { family: Family },
    Empirical,
}

impl FromStr for CopulaChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h.trim(), Some(t.trim())),
            None => (s.trim(), None),
        };
        if head.eq_ignore_ascii_case("fit") {
            let family: Family = tail
                .ok_or("fit needs a family, as in fit:clayton")?
                .parse()?;
            if !family.is_archimedean() {
                return Err(format!(
                    "cannot fit `{family}`; use clayton, gumbel or frank"
                ));
            }
            return Ok(CopulaChoice::Fit { family });
        }
        let family: Family = head.parse()?;
        match (family, tail) {
            (Family::Empirical, None) => Ok(CopulaChoice::Empirical),
            (f, None) if !f.is_archimedean() && f != Family::Empirical => {
                Ok(CopulaChoice::Parametric {
                    family: f,
                    theta: None,
                })
            }
            (f, Some(t)) if f.is_archimedean() => {
                let theta = t
                    .parse::<f64>()
                    .map_err(|_| format!("cannot parse parameter `{t}` of {f}"))?;
                Ok(CopulaChoice::Parametric {
                    family: f,
                    theta: Some(theta),
                })
            }
            (f, None) => Err(format!("{f} needs a parameter, as in {f}:2")),
            (f, Some(_)) => Err(format!("{f} takes no parameter")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistortionChoice {
    Var,
    Cvar,
    Identity,
    Power { k: f64 },
}

impl FromStr for DistortionChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "var" => Ok(Self::Var),
            "cvar" => Ok(Self::Cvar),
            "identity" => Ok(Self::Identity),
            other => match other.strip_prefix("power:") {
                Some(k) => k
                    .parse::<f64>()
                    .ok()
                    .filter(|k| k.is_finite() && *k > 0.0)
                    .map(|k| Self::Power { k })
                    .ok_or_else(|| format!("power exponent `{k}` must be a positive number")),
                None => Err(format!(
                    "unknown distortion `{other}`; expected var, cvar, identity or power:k"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum MatchPolicy {
    Warn,
    Assert { threshold: f64 },
}

impl FromStr for MatchPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "warn" => Ok(Self::Warn),
            "assert" => Ok(Self::Assert {
                threshold: DEFAULT_GOF_THRESHOLD,
            }),
            other => {
                let t = other.strip_prefix("assert:").ok_or_else(|| {
                    format!("unknown policy `{other}`; expected warn or assert[:threshold]")
                })?;
                match t.parse::<f64>() {
                    Ok(threshold) if threshold.is_finite() && threshold > 0.0 => {
                        Ok(Self::Assert { threshold })
                    }
                    _ => Err(format!("threshold `{t}` must be a positive number")),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionChoice {
    Whole,
    Joint,
}

impl FromStr for RegionChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "whole" => Ok(Self::Whole),
            "joint" => Ok(Self::Joint),
            other => Err(format!("unknown region `{other}`; expected whole or joint")),
        }
    }
}

/// A validated invocation.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub measure: Measure,
    pub input: Option<PathBuf>,
    pub copula: CopulaChoice,
    pub band: ConfidenceBand,
    pub q: f64,
    pub distortions: Vec<DistortionChoice>,
    pub grid_n: Option<usize>,
    pub seed: u64,
    pub trials: usize,
    pub match_policy: MatchPolicy,
    pub region: RegionChoice,
    pub dim: usize,
    pub dyadic_n: Option<u32>,
    pub out: Option<PathBuf>,
}

fn invalid(flag: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{flag}: {msg}"))
}

impl RunConfig {
    pub fn from_options(measure: Measure, o: Options) -> Result<Self> {
        let copula = o.copula.parse().map_err(|e| invalid("--copula", e))?;
        let (a1, a2) = o
            .band
            .split_once(',')
            .ok_or_else(|| invalid("--band", format!("expected a1,a2, got `{}`", o.band)))?;
        let parse_level = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| invalid("--band", format!("cannot parse `{s}`")))
        };
        let band = ConfidenceBand::new(parse_level(a1)?, parse_level(a2)?)
            .map_err(|e| invalid("--band", e))?;
        if !(o.q > 0.0 && o.q < 1.0) {
            return Err(invalid("--q", format!("{} is not in (0, 1)", o.q)));
        }
        let distortions = o
            .distortions
            .iter()
            .map(|s| s.parse())
            .collect::<std::result::Result<Vec<DistortionChoice>, _>>()
            .map_err(|e| invalid("--distortion", e))?;
        if let Some(n) = o.grid_n {
            if n < 2 {
                return Err(invalid(
                    "--grid-n",
                    format!("{n} is below the minimum of 2"),
                ));
            }
        }
        let match_policy = o.match_policy.parse().map_err(|e| invalid("--match", e))?;
        let region = o.region.parse().map_err(|e| invalid("--region", e))?;
        if o.dim == 0 {
            return Err(invalid("--dim", "dimension must be at least 1"));
        }
        if o.trials == 0 {
            return Err(invalid("--trials", "need at least one trial"));
        }
        if measure.needs_input() && o.input.is_none() {
            return Err(invalid("--input", "this command needs a scenario file"));
        }
        Ok(Self {
            measure,
            input: o.input,
            copula,
            band,
            q: o.q,
            distortions,
            grid_n: o.grid_n,
            seed: o.seed,
            trials: o.trials,
            match_policy,
            region,
            dim: o.dim,
            dyadic_n: o.dyadic_n,
            out: o.out,
        })
    }
}
