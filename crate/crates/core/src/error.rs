use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("estimate not applicable: {0}")]
    NotApplicable(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("did not converge: {msg} (best estimate {best:e}, error estimate {err:e})")]
    Convergence { msg: String, best: f64, err: f64 },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("under-resolved: {0}")]
    Resolution(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
