use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or configuration parameter violates its constraint.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A call-shape problem (empty input, zero count, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// An iterative or quadrature routine failed to reach its tolerance.
    #[error("{what} did not converge (achieved error estimate {achieved:e})")]
    Convergence { what: String, achieved: f64 },
    /// A numeric failure that is not a plain convergence miss.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A moment or integral that diverges for the given parameters.
    #[error("divergent: {0}")]
    Divergent(String),
    /// Malformed input data.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Domain(_) | Error::Argument(_) | Error::Parse { .. } | Error::Divergent(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
