use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("config line {line}: key `{key}`: {reason}")]
    ConfigKey {
        key: String,
        line: usize,
        reason: String,
    },

    #[error("dimension mismatch: expected {expected} spins, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("site {site} out of range for {n_spins} spins")]
    SiteOutOfRange { site: usize, n_spins: usize },

    #[error("measurement branch probability {probability:e} below degeneracy threshold")]
    DegenerateBranch { probability: f64 },

    #[error("integration diverged at t = {time} s")]
    Diverged { time: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed file: {reason}")]
    Format { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::ConfigKey { .. })
    }
}
