use std::path::PathBuf;

use sbgd_core::SbgdError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("could not parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Optimizer(#[from] SbgdError),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit status: 2 configuration, 3 line search, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Parse { .. } => 2,
            CliError::Optimizer(SbgdError::Parameter { .. } | SbgdError::Resource(_)) => 2,
            CliError::Optimizer(
                SbgdError::LineSearchFailure { .. } | SbgdError::StepBoundViolation { .. },
            ) => 3,
            CliError::Io { .. } | CliError::Csv(_) => 4,
            CliError::Optimizer(SbgdError::InvalidSwarm(_)) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::io("CSV I/O", io),
                _ => unreachable!("checked is_io_error"),
            }
        } else {
            CliError::Csv(e.to_string())
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
