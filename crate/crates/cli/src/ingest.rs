//! Scenario CSV ingestion.
//!
//! Comma separated, `.` decimal point, UTF-8, first row a header of asset
//! names. A final column named `weight` (any case) carries scenario weights.

use std::path::Path;

use jointrisk::ScenarioSet;

use crate::error::{CliError, Context, Result};

/// A loaded scenario file plus the notes worth surfacing in the report.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub scenarios: ScenarioSet,
    pub warnings: Vec<String>,
}

fn at(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{}:{line}: {msg}", path.display()))
}

pub fn ingest_csv(path: &Path) -> Result<Ingested> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(CliError::Validation(format!(
            "{}: empty file",
            path.display()
        )));
    }
    let has_weight = header
        .last()
        .is_some_and(|h| h.eq_ignore_ascii_case("weight"));
    let names: Vec<String> = header[..header.len() - usize::from(has_weight)].to_vec();
    if names.is_empty() {
        return Err(at(path, 1, "header names no asset columns"));
    }
    if let Some(i) = names.iter().position(|n| n.is_empty()) {
        return Err(at(path, 1, format!("column {} has an empty name", i + 1)));
    }

    let mut rows = Vec::new();
    let mut weights = has_weight.then(Vec::new);
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            at(path, line, e)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(names.len());
        for (j, cell) in record.iter().enumerate() {
            let column = &header[j];
            let x: f64 = cell.parse().map_err(|_| {
                at(
                    path,
                    line,
                    format!("column `{column}`: cannot parse `{cell}` as a number"),
                )
            })?;
            if !x.is_finite() {
                return Err(at(
                    path,
                    line,
                    format!("column `{column}`: value `{cell}` is not finite"),
                ));
            }
            if j < names.len() {
                row.push(x);
            } else if x > 0.0 {
                weights.as_mut().expect("weight column present").push(x);
            } else {
                return Err(at(
                    path,
                    line,
                    format!("column `{column}`: non-positive weight {x}"),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(at(path, 2, "no data rows after the header"));
    }

    let scenarios = ScenarioSet::new(names, rows, weights).context(&path.display().to_string())?;
    let mut warnings = Vec::new();
    if scenarios.weights_renormalized() {
        warnings.push(format!(
            "{}: weights did not sum to 1 and were renormalized",
            path.display()
        ));
    }
    Ok(Ingested {
        scenarios,
        warnings,
    })
}
