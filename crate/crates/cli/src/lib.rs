//! Experiment runner behind the `adlab` binary.

pub mod artifacts;
pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration at `{path}`: {reason}")]
    Validation { path: String, reason: String },

    #[error("missing prior artifacts: {}", .0.join("; "))]
    Dependency(Vec<String>),

    #[error("i/o: {0}")]
    Io(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    /// 1 for validation and setup problems, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Dependency(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

impl From<adlab::Error> for CliError {
    fn from(e: adlab::Error) -> Self {
        match e {
            adlab::Error::Parameter { name, reason } => CliError::Validation { path: name.into(), reason },
            adlab::Error::Precondition(reason) => CliError::Validation { path: "<input>".into(), reason },
            other => CliError::Numeric(other.to_string()),
        }
    }
}
