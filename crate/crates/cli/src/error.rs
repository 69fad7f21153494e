use jointrisk::RiskError;
use thiserror::Error;

/// Failures of one CLI invocation, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, or a computation precondition.
    #[error("{0}")]
    Validation(String),

    #[error(
        "--match: gof distance {distance:.6} between the data and the declared copula {copula} exceeds the threshold {threshold}"
    )]
    Match {
        copula: String,
        distance: f64,
        threshold: f64,
    },

    #[error("{0}")]
    DegenerateTail(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Match { .. } => 3,
            CliError::DegenerateTail(_) => 4,
        }
    }

    /// Wraps a library error with the flag or input it came from.
    pub fn from_risk(context: &str, e: RiskError) -> Self {
        match e {
            RiskError::DegenerateTail(msg) => {
                CliError::DegenerateTail(format!("{context}: degenerate tail: {msg}"))
            }
            other => CliError::Validation(format!("{context}: {other}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Attaches a context label to library results.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, RiskError> {
    fn context(self, what: &str) -> Result<T> {
        self.map_err(|e| CliError::from_risk(what, e))
    }
}
