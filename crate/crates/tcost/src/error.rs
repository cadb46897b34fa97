use std::path::PathBuf;

use tcost_core::Error as CoreError;

/// Everything that can stop a command, grouped by exit code.
///
/// | Class | Exit code |
/// |-------|-----------|
/// | assertion violations | 1 |
/// | command-line usage (clap) | 2 |
/// | unreadable or malformed input | 3 |
/// | parameter out of range | 4 |
/// | solver failure | 5 |
/// | output not writable | 6 |
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{count} assertion violation(s)")]
    Violations { count: usize },

    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("invalid input: {0}")]
    Input(CoreError),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("solver failure: {0}")]
    Solver(CoreError),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

pub type CliResult<T> = Result<T, CliError>;

pub mod exit {
    pub const VIOLATIONS: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const PARAMETER: i32 = 4;
    pub const SOLVER: i32 = 5;
    pub const IO: i32 = 6;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Violations { .. } => exit::VIOLATIONS,
            Self::Parse { .. } | Self::Input(_) => exit::PARSE,
            Self::Parameter { .. } => exit::PARAMETER,
            Self::Solver(_) => exit::SOLVER,
            Self::Read { .. } | Self::Write { .. } => exit::IO,
        }
    }

    pub fn parameter(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn write(path: impl Into<PathBuf>, err: impl std::fmt::Display) -> Self {
        Self::Write {
            path: path.into(),
            message: err.to_string(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { name, reason } => Self::Parameter {
                name: name.into(),
                reason,
            },
            CoreError::Dimension { .. }
            | CoreError::InvalidMetric(_)
            | CoreError::InvalidMeasure(_)
            | CoreError::InvalidDensity(_) => Self::Input(e),
            CoreError::Undefined(_)
            | CoreError::NotConverged { .. }
            | CoreError::Overflow(_)
            | CoreError::Disconnected(_) => Self::Solver(e),
        }
    }
}
