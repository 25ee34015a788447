use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Configuration problems: syntax, unknown keys, or values that fail validation.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("sweep parameter `{0}` does not name a numeric config field")]
    SweepPath(String),
    #[error("a sweep needs at least two values, got {0}")]
    SweepValues(usize),
}

impl ConfigError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        ConfigError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Physics { context: String, source: dwdm_core::Error },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl SimError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 1,
            SimError::Physics { .. } => 2,
            SimError::Io { .. } => 3,
        }
    }

    pub(crate) fn physics(context: impl Into<String>) -> impl FnOnce(dwdm_core::Error) -> SimError {
        let context = context.into();
        move |source| SimError::Physics { context, source }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> SimError {
        let path = path.into();
        move |source| SimError::Io { path, source }
    }
}
