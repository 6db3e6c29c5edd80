use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}, key `{key}`: {message}")]
    Config { line: usize, key: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{module}: {source}")]
    Numeric { module: &'static str, source: bec_cavity::Error },
}

impl CliError {
    pub fn config(line: usize, key: &str, message: &str) -> Self {
        Self::Config { line, key: key.to_string(), message: message.to_string() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }
}

/// Tags a core error with the module that raised it.
pub trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> InModule<T> for bec_cavity::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numeric { module, source })
    }
}
