use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// A computation inside a named analysis failed.
    #[error("analysis `{analysis}` failed: {message}")]
    Compute { analysis: String, message: String },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn compute(analysis: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::Compute {
            analysis: analysis.into(),
            message: err.to_string(),
        }
    }

    /// 1 for usage, config and I/O problems; 2 when the mathematics failed.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Compute { .. } => 2,
            _ => 1,
        }
    }
}
