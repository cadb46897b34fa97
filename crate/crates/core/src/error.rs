use alloc::string::String;

/// Errors raised by constructions, solvers and checkers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The requested quantity is undefined for this input (zero entropy ratio,
    /// constant test function, empty truncation set, ...).
    #[error("undefined: {0}")]
    Undefined(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("numerical overflow: {0}")]
    Overflow(String),

    /// The reversible structure does not connect the support of the measure.
    #[error("disconnected support: {0}")]
    Disconnected(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
