use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Invalid(String),

    /// A structurally well-formed document with a bad field.
    #[error("{field}: {message}")]
    Field { field: String, message: String },

    /// Malformed JSON; serde_json reports line and column.
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },

    #[error("{what} exceeds guard: {actual} > {limit}")]
    SizeGuard {
        what: &'static str,
        limit: u128,
        actual: u128,
    },

    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),

    /// An internal invariant failed. Signals a bug rather than bad input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn guard(what: &'static str, limit: u128, actual: u128) -> Self {
        Error::SizeGuard {
            what,
            limit,
            actual,
        }
    }

    /// True for errors that indicate a bug in this crate rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
