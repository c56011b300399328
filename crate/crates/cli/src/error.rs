use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Process exit codes. Usage errors are reported by the argument parser
/// with code 2.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const IO: i32 = 4;
    pub const FORMAT: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Input is well-formed but violates a rule (bad threshold, duplicate
    /// pair, output exists, ...).
    #[error("{0}")]
    Validation(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    /// A file could not be parsed.
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => exit::VALIDATION,
            Self::Io { .. } => exit::IO,
            Self::Format { .. } => exit::FORMAT,
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn format(path: &Path, message: impl Into<String>) -> Self {
        Self::Format {
            path: path.to_owned(),
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::Validation(message.into())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
