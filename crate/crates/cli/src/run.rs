//! Command dispatch.

use std::time::{SystemTime, UNIX_EPOCH};

use jointrisk::{
    alpha_c, axiom_suite, default_grid_n, dyadic_sandwich, empirical_copula, fit_archimedean,
    frechet_distances, gamma_ls_form, gamma_signed_2d, gamma_survival_form, h_vector,
    kendall_tau_matrix, mixture_var_cvar, mtce, mtdrm, AdjustedConfidence, Copula, DistortionFn,
    Family, JointRiskSpec, ScenarioSet, TailKind, TailRegionSpec,
};

use crate::config::{
    CopulaChoice, DistortionChoice, MatchPolicy, Measure, RegionChoice, RunConfig,
};
use crate::error::{CliError, Context, Result};
use crate::ingest::ingest_csv;
use crate::report::{
    AxiomRun, CopulaDiagnostics, FitCandidate, MarginalTail, MeasureResult, Provenance, RiskReport,
    ScenarioReport, SCHEMA_VERSION,
};

struct Resolved {
    copula: Copula,
    fit: Option<jointrisk::FitSummary>,
}

fn resolve_copula(cfg: &RunConfig, data: Option<&ScenarioSet>) -> Result<Resolved> {
    let dim = data.map_or(cfg.dim, ScenarioSet::dim);
    match cfg.copula {
        CopulaChoice::Parametric { family, theta } => Ok(Resolved {
            copula: Copula::parametric(family, dim, theta).context("--copula")?,
            fit: None,
        }),
        CopulaChoice::Fit { family } => {
            let s =
                data.ok_or_else(|| CliError::Validation("--copula: fitting needs --input".into()))?;
            let fit = fit_archimedean(s, family).context("--copula")?;
            Ok(Resolved {
                fit: Some(fit.summary()),
                copula: fit.copula,
            })
        }
        CopulaChoice::Empirical => {
            let s = data.ok_or_else(|| {
                CliError::Validation(
                    "--copula: the empirical copula needs --input; name a parametric copula instead".into(),
                )
            })?;
            Ok(Resolved {
                copula: empirical_copula(s).context("--copula")?,
                fit: None,
            })
        }
    }
}

fn scenario_report(s: &ScenarioSet, cfg: &RunConfig) -> Result<ScenarioReport> {
    let (a1, a2) = (cfg.band.lower(), cfg.band.upper());
    let tails = (0..s.dim())
        .map(|i| {
            Ok(MarginalTail {
                name: s.names()[i].clone(),
                var_lower: s.var(i, a1)?,
                var_upper: s.var(i, a2)?,
                cvar_lower: s.cvar(i, a1)?,
                cvar_upper: s.cvar(i, a2)?,
            })
        })
        .collect::<jointrisk::Result<Vec<_>>>()
        .context("--band")?;
    Ok(ScenarioReport {
        summary: s.summary(),
        tails,
    })
}

fn threshold(policy: MatchPolicy) -> f64 {
    match policy {
        MatchPolicy::Warn => jointrisk::DEFAULT_GOF_THRESHOLD,
        MatchPolicy::Assert { threshold } => threshold,
    }
}

/// Expands `--distortion` to one entry per component.
fn per_component(
    choices: &[DistortionChoice],
    dim: usize,
    default: DistortionChoice,
) -> Result<Vec<DistortionChoice>> {
    match choices.len() {
        0 => Ok(vec![default; dim]),
        1 => Ok(vec![choices[0]; dim]),
        n if n == dim => Ok(choices.to_vec()),
        n => Err(CliError::Validation(format!(
            "--distortion: given {n} times for {dim} components; give it once or once per component"
        ))),
    }
}

/// VaR and CVaR distortions are taken at the dependence-adjusted level α_c.
fn build_distortions(
    choices: &[DistortionChoice],
    confidence: &AdjustedConfidence,
) -> Result<Vec<DistortionFn>> {
    choices
        .iter()
        .map(|c| match *c {
            DistortionChoice::Var => DistortionFn::var_step(confidence.alpha_c),
            DistortionChoice::Cvar => DistortionFn::cvar_ramp(confidence.alpha_c),
            DistortionChoice::Identity => Ok(DistortionFn::Identity),
            DistortionChoice::Power { k } => DistortionFn::power(k),
        })
        .collect::<jointrisk::Result<Vec<_>>>()
        .context("--distortion")
}

fn tail_kinds(choices: &[DistortionChoice]) -> Result<Vec<TailKind>> {
    choices
        .iter()
        .map(|c| match c {
            DistortionChoice::Var => Ok(TailKind::Var),
            DistortionChoice::Cvar => Ok(TailKind::Cvar),
            other => Err(CliError::Validation(format!(
                "--distortion: this command accepts only var or cvar, got {other:?}"
            ))),
        })
        .collect()
}

fn require(data: Option<&ScenarioSet>) -> Result<&ScenarioSet> {
    data.ok_or_else(|| CliError::Validation("--input: this command needs a scenario file".into()))
}

pub fn run(cfg: &RunConfig) -> Result<RiskReport> {
    let mut warnings = Vec::new();
    let data = match &cfg.input {
        Some(path) => {
            let ingested = ingest_csv(path)?;
            warnings.extend(ingested.warnings);
            Some(ingested.scenarios)
        }
        None => None,
    };
    let data = data.as_ref();
    let Resolved { copula, fit } = resolve_copula(cfg, data)?;
    let dim = copula.dim();
    let grid_n = cfg.grid_n.unwrap_or_else(|| default_grid_n(dim));
    let gof_threshold = threshold(cfg.match_policy);

    let gof_distance = match data {
        Some(s) if dim >= 2 && copula.family() != Family::Empirical => {
            let e = empirical_copula(s).context("--input")?;
            Some(jointrisk::gof_distance(&e, &copula, grid_n).context("--copula")?)
        }
        Some(_) if copula.family() == Family::Empirical => Some(0.0),
        _ => None,
    };
    let matched = gof_distance.map(|g| g <= gof_threshold);
    if matched == Some(false) {
        let distance = gof_distance.unwrap_or_default();
        match cfg.match_policy {
            MatchPolicy::Assert { threshold } => {
                return Err(CliError::Match {
                    copula: copula.label(),
                    distance,
                    threshold,
                });
            }
            MatchPolicy::Warn => warnings.push(format!(
                "gof distance {distance:.6} between the data and {} exceeds {gof_threshold}; results assume the declared copula",
                copula.label()
            )),
        }
    }
    let confidence = alpha_c(&copula, cfg.band, grid_n).context("--copula")?;
    let scenarios = data.map(|s| scenario_report(s, cfg)).transpose()?;
    let names = || data.map(|s| s.names().to_vec()).unwrap_or_default();

    let result = match cfg.measure {
        Measure::Scalar | Measure::Vector | Measure::Signed2d => {
            let s = require(data)?;
            let choices = per_component(&cfg.distortions, dim, DistortionChoice::Cvar)?;
            let distortions = build_distortions(&choices, &confidence)?;
            let spec = JointRiskSpec::new(copula.survival(), distortions.clone())
                .context("--distortion")?;
            match cfg.measure {
                Measure::Scalar => {
                    let survival_form = gamma_survival_form(s, &spec).context("scalar")?;
                    let ls_form = gamma_ls_form(s, &spec).context("scalar")?;
                    let dyadic = cfg
                        .dyadic_n
                        .map(|n| dyadic_sandwich(s, &spec, n).context("--dyadic-n"))
                        .transpose()?;
                    MeasureResult::Scalar {
                        distortions,
                        survival_form,
                        ls_form,
                        dyadic,
                    }
                }
                Measure::Vector => MeasureResult::Vector {
                    names: names(),
                    distortions,
                    vector: h_vector(s, &spec).context("vector")?,
                },
                _ => MeasureResult::Signed2d {
                    value: gamma_signed_2d(s, &spec).context("signed2d")?,
                    distortions,
                },
            }
        }
        Measure::Mixture => {
            let s = require(data)?;
            let kinds = tail_kinds(&per_component(
                &cfg.distortions,
                dim,
                DistortionChoice::Cvar,
            )?)?;
            MeasureResult::Mixture {
                names: names(),
                vector: mixture_var_cvar(s, &copula, cfg.band, &kinds, grid_n)
                    .context("mixture")?,
                kinds,
            }
        }
        Measure::Mtce => MeasureResult::Mtce {
            names: names(),
            q: cfg.q,
            vector: mtce(require(data)?, &copula, cfg.q).context("mtce")?,
        },
        Measure::Mtdrm => {
            let s = require(data)?;
            let choices = per_component(&cfg.distortions, dim, DistortionChoice::Identity)?;
            let distortions = build_distortions(&choices, &confidence)?;
            let region = match cfg.region {
                RegionChoice::Whole => TailRegionSpec::WholeSpace,
                RegionChoice::Joint => TailRegionSpec::JointExceedance { q: cfg.q },
            };
            MeasureResult::Mtdrm {
                names: names(),
                vector: mtdrm(s, &copula, &distortions, region).context("mtdrm")?,
                region,
                distortions,
            }
        }
        Measure::Axioms => {
            let kinds = if cfg.distortions.is_empty() {
                vec![TailKind::Var, TailKind::Cvar]
            } else {
                let mut k = tail_kinds(&cfg.distortions)?;
                k.dedup();
                k
            };
            let band = cfg.band;
            let runs = kinds
                .into_iter()
                .map(|kind| {
                    let factory = move |c: &Copula| {
                        JointRiskSpec::mixture(c, band, &vec![kind; c.dim()], grid_n)
                            .map(|(s, _)| s)
                    };
                    let report =
                        axiom_suite(&factory, &copula, cfg.seed, cfg.trials).context("axioms")?;
                    Ok(AxiomRun { kind, report })
                })
                .collect::<Result<Vec<_>>>()?;
            let all_passed = runs.iter().all(|r| r.report.all_passed());
            if !all_passed {
                warnings.push("at least one axiom check failed; see the witnesses".into());
            }
            MeasureResult::Axioms { all_passed, runs }
        }
        Measure::CopulaFit => {
            let s = require(data)?;
            let kendall_tau = kendall_tau_matrix(s).context("copula-fit")?;
            let e = empirical_copula(s).context("--input")?;
            let candidates: Vec<FitCandidate> = [Family::Clayton, Family::Gumbel, Family::Frank]
                .into_iter()
                .map(|family| {
                    let fitted = fit_archimedean(s, family)
                        .and_then(|f| Ok((jointrisk::gof_distance(&e, &f.copula, grid_n)?, f)));
                    match fitted {
                        Ok((gof, f)) => FitCandidate {
                            family,
                            fit: Some(f.summary()),
                            gof_distance: Some(gof),
                            error: None,
                        },
                        Err(err) => FitCandidate {
                            family,
                            fit: None,
                            gof_distance: None,
                            error: Some(err.to_string()),
                        },
                    }
                })
                .collect();
            let best = candidates
                .iter()
                .filter_map(|c| c.gof_distance.map(|g| (g, c.family)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(_, f)| f);
            MeasureResult::CopulaFit {
                kendall_tau,
                candidates,
                best,
            }
        }
        Measure::CopulaDistance => MeasureResult::CopulaDistance {
            frechet: frechet_distances(&copula, grid_n).context("copula-distance")?,
            confidence: confidence.clone(),
        },
    };

    Ok(RiskReport {
        schema_version: SCHEMA_VERSION,
        command: cfg.measure,
        config: cfg.clone(),
        scenarios,
        copula: CopulaDiagnostics {
            family: copula.family(),
            label: copula.label(),
            dim,
            parameter: copula.parameter(),
            fit,
            gof_distance,
            gof_threshold,
            matched,
            confidence: Some(confidence),
        },
        result,
        warnings,
        provenance: Provenance {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed: cfg.seed,
            generated_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        },
    })
}
