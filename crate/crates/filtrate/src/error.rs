use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown poset element `{0}`")]
    UnknownElement(String),

    #[error("relation is not a partial order: {0}")]
    NotAPartialOrder(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("budget of {limit} exceeded while {context}")]
    Budget { limit: usize, context: String },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("integer overflow in exact arithmetic")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
