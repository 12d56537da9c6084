use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario: field `{field}`: {message}")]
    Validation { field: &'static str, message: String },
    #[error("{}: {0}", .0.name())]
    Solver(#[from] quatode_core::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn validation(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Validation { field, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Parse(_) | CliError::Validation { .. } => 2,
            CliError::Solver(quatode_core::Error::NonFiniteState { .. }) => 4,
            CliError::Solver(_) => 3,
            CliError::Write { .. } | CliError::Csv(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
