use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// A config file that does not match the schema.
    #[error("{path}: field `{field}` (line {line}, column {column}): {message}")]
    Schema { path: String, field: String, line: usize, column: usize, message: String },

    #[error("{0}")]
    Pipeline(#[from] oscavg_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("verification rejected the prediction: {0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Schema { .. } | CliError::Io { .. } => 1,
            CliError::Pipeline(_) => 2,
            CliError::Rejected(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
