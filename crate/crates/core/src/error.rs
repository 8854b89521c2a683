use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the law or function.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller asked for something malformed (empty input, bad range, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// An iterative numeric routine did not converge.
    #[error("numeric failure: {message} (last bracket [{lo}, {hi}])")]
    NumericFailure { message: String, lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
