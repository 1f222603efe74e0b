use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A named condition or item does not exist.
    #[error("not found: {0}")]
    Lookup(String),

    /// On-disk data is malformed.
    #[error("format error in {path}: {reason}", path = .path.display())]
    Format { path: PathBuf, reason: String },

    /// A wire artifact (helper data, record) is structurally invalid.
    #[error("protocol error: {0}")]
    Protocol(String),

    /// No catalog code reaches the requested failure target.
    #[error("no feasible code: best achievable failure rate {best_pfail:e} with BCH({n},{k},{t})")]
    Planning {
        best_pfail: f64,
        n: usize,
        k: usize,
        t: usize,
    },

    #[error("io error on {path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
