use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A parameter lies exactly on a threshold where the model makes no claim.
    #[error("parameters lie on an unspecified boundary: {0}")]
    BoundaryUnspecified(String),

    #[error("no best response: {0}")]
    NoBestResponse(String),

    #[error("knife-edge realization at m = {m} left unresolved")]
    UnresolvedTie { m: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
