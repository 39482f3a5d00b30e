use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by graph ingestion, ranking and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// A node id outside `0..n` was encountered.
    #[error("node id {id} out of bounds (n = {n})")]
    NodeOutOfBounds { id: u64, n: usize },

    /// Structural mismatch between inputs (line counts, header vs body, ...).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A caller-supplied argument violates an operation precondition.
    #[error("invalid input: {0}")]
    Precondition(String),

    #[error(
        "power iteration did not converge after {iters} iterations \
         (residual {residual:e}, tol {tol:e})"
    )]
    NonConvergence {
        iters: usize,
        residual: f64,
        tol: f64,
    },

    /// A crawl trace is too short to reach the requested coverage target.
    #[error("coverage target unreachable: {0}")]
    Unreachable(String),

    /// Misuse of the emit/report protocol of a dynamic strategy.
    #[error("dynamic strategy protocol violation: {0}")]
    Protocol(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
