use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A configured work bound (enumeration size, walk extensions, ...) was hit.
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("division by a series with vanishing constant term")]
    Singularity,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    /// An identity that must hold by construction did not; signals a convention bug.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
