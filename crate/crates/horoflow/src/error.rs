use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Problems with an experiment configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    /// Malformed line, unknown key or unparsable value.
    #[error("line {line}: {message}")]
    Syntax {
        /// 1-based line number.
        line: usize,
        /// Description.
        message: String,
    },
    /// Value outside its admissible range.
    #[error("{key}: {message}")]
    Range {
        /// Offending key.
        key: &'static str,
        /// Description.
        message: String,
    },
}

/// Errors of the experiment driver.
#[derive(Debug, Error)]
pub enum RunError {
    /// Invalid configuration.
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    /// Initial data cannot be represented as a radial graph.
    #[error("invalid initial data: {0}")]
    InitialData(String),
    /// Failure inside the numerical core.
    #[error(transparent)]
    Core(#[from] horoflow_core::Error),
    /// Filesystem failure.
    #[error("{path}: {source}")]
    Io {
        /// File or directory involved.
        path: PathBuf,
        /// Underlying error.
        source: io::Error,
    },
}

impl RunError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> RunError {
        let path = path.into();
        move |source| RunError::Io { path, source }
    }
}
