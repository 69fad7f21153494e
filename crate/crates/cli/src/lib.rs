//! The `risk` command: scenario CSV in, JSON report out.

pub mod config;
pub mod error;
pub mod ingest;
pub mod report;
pub mod run;

pub use config::{Cli, RunConfig};
pub use error::{CliError, Result};
pub use ingest::{ingest_csv, Ingested};
pub use report::{without_timestamp, RiskReport};
pub use run::run;

/// Validates parsed flags, runs the command and writes the report.
pub fn execute(cli: Cli) -> Result<()> {
    let (measure, options) = cli.command.split();
    let cfg = RunConfig::from_options(measure, options)?;
    let report = run(&cfg)?;
    report.emit(cfg.out.as_deref())
}
