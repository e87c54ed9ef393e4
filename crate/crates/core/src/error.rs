use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An operation was called outside its domain.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Hypotheses of a computation fail; one message per failed hypothesis.
    #[error("hypotheses not satisfied: {}", .0.join("; "))]
    Hypotheses(Vec<String>),
    /// The weight box kept producing contributions on its boundary.
    #[error("weight box did not stabilize: {0}")]
    UnstableBox(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

impl Error {
    /// Process exit status: 1 for an unstable weight box, 2 for input and hypothesis errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnstableBox(_) => 1,
            _ => 2,
        }
    }
}
