use thiserror::Error;

/// Errors raised by the sampling, planning and analysis routines.
///
/// The variants split into caller mistakes (`Usage`, `Precondition`),
/// domain failures that are a property of the input geometry (`Domain`,
/// `Unreachable`) and failures of the surrounding environment (`Environment`,
/// `Io`).
#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unreachable: {0}")]
    Unreachable(String),
    #[error("environment error: {0}")]
    Environment(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors caused by how the API or CLI was invoked.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Usage(_) | Error::DimensionMismatch { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
