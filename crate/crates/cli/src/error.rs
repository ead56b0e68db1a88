use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

/// Failures that stop a command before a verdict is reached. All of them
/// exit with status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config file {}: {source}", path.display())]
    ReadConfig { path: PathBuf, source: std::io::Error },

    #[error("malformed config file {}: {source}", path.display())]
    ParseConfig { path: PathBuf, source: serde_json::Error },

    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error(transparent)]
    Core(#[from] sbpsat::Error),

    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("cannot serialize summary: {0}")]
    Serialize(#[from] serde_json::Error),
}
