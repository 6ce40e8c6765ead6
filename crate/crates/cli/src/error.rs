use std::path::PathBuf;

use hypwave_core::HypError;
use thiserror::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    /// A configuration key is missing, unknown or out of range.
    #[error("{key}: {message}")]
    Config { key: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("experiment `{experiment}`: {source}")]
    Run {
        experiment: String,
        source: HypError,
    },
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// The key named by a configuration error.
    pub fn key(&self) -> Option<&str> {
        match self {
            Self::Config { key, .. } => Some(key),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Run {
                source: HypError::SolverAbort { .. },
                ..
            } => EXIT_ABORT,
            _ => EXIT_CONFIG,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
