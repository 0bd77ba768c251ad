use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Error)]
pub enum SmkpError {
    /// Malformed or inconsistent input (unknown ids, overlapping sets, bad parameters).
    #[error("invalid input: {0}")]
    Input(String),

    /// The requested exhaustive computation exceeds its size limit.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// Configuration enumeration would exceed the configured cap.
    #[error("configuration cap exceeded: {0}")]
    Capacity(String),

    /// A solver invariant failed; indicates a bug rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SmkpError>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(SmkpError::Input(msg.into()))
}
