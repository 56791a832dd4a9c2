use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// An exponential oracle was asked to run on an input above its size cap.
    #[error("refused: {0}")]
    Refused(String),
    /// Malformed input text, with the 1-based line number where it was found.
    #[error("line {line}: {msg}")]
    Input { line: usize, msg: String },
    /// A flow is not conservative where it was required to be.
    #[error("inconsistent flow: {0}")]
    Consistency(String),
    /// An algorithm was driven from a state it cannot continue from.
    #[error("invalid state: {0}")]
    State(String),
    /// An internal invariant failed; this indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn internal<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Internal(msg.into()))
}
