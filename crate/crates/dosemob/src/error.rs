//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration (CLI flags, config files, control parameters).
    #[error("config error: {0}")]
    Config(String),
    /// Invalid or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),
    /// A model could not be fitted.
    #[error("fit error: {0}")]
    Fit(String),
    /// The empirical score covariance is (numerically) singular, so the
    /// parameter-instability tests cannot be whitened at this node.
    #[error("singular score covariance: {0}")]
    Singular(String),
    /// Evaluation outside the supported dose range or routing failure.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed or invariant-violating tree document.
    #[error("tree document error: {0}")]
    Document(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the CLI. 0 is reserved for success.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Document(_) => 3,
            Error::Fit(_) | Error::Singular(_) | Error::Domain(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
