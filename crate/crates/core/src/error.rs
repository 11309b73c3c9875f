use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent user input (arity mismatch, index out of range, ...).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("closure exceeded cap of {cap} functions")]
    ClosureCap { cap: usize },

    #[error("transformation closure exceeded cap of {cap} maps")]
    TransformCap { cap: usize },

    #[error("instance enumeration exceeds cap: {0}")]
    EnumerationCap(String),

    /// A function system is missing a composite, projection or meet.
    #[error("system is not closed: {0}")]
    NotClosed(String),

    /// A construction was invoked outside its preconditions.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A post-verification failed. Never expected; signals a bug.
    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("relation is not transitive: ({0},{1}) and ({1},{2}) related but ({0},{2}) is not")]
    NotTransitive(usize, usize, usize),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
