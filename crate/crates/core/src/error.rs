use thiserror::Error;

/// Errors raised by the risk-measure library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter {name} = {value} outside its domain: {constraint}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("{what} = {value} outside [0, 1]")]
    OutOfUnitInterval { what: &'static str, value: f64 },

    #[error("box corners are not ordered: a[{coord}] = {lower} > b[{coord}] = {upper}")]
    Ordering {
        coord: usize,
        lower: f64,
        upper: f64,
    },

    #[error("{op} is not supported in dimension {dim}")]
    UnsupportedDimension { op: &'static str, dim: usize },

    #[error("marginal index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid scenario data: {0}")]
    Data(String),

    #[error("{op} requires nonnegative losses (marginal {marginal} has value {value})")]
    NegativeLoss {
        op: &'static str,
        marginal: usize,
        value: f64,
    },

    #[error("dyadic truncation level {level} does not exceed the maximum loss {max_loss}")]
    Truncation { level: u32, max_loss: f64 },

    #[error(
        "transform for marginal {marginal} is not non-decreasing: h({x0}) = {y0} > h({x1}) = {y1}"
    )]
    NotMonotone {
        marginal: usize,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
    },

    #[error("transform for marginal {marginal} merges distinct values {x0} and {x1}, which changes the empirical copula")]
    TiesIntroduced { marginal: usize, x0: f64, x1: f64 },

    #[error("copula fit failed: {0}")]
    Fit(String),

    #[error("degenerate tail: {0}")]
    DegenerateTail(String),
}

pub type Result<T> = std::result::Result<T, RiskError>;

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(RiskError::OutOfUnitInterval { what, value })
    }
}
