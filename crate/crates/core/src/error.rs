use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A constructive procedure could not complete; `step` names the stage.
    #[error("embedding failed at step {step}: {reason}")]
    EmbedFailed { step: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    /// A proven bound did not hold. This means a bug, not bad luck.
    #[error("bound violated: {0}")]
    BoundViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn failed<T>(step: &str, reason: impl Into<String>) -> Result<T> {
    Err(Error::EmbedFailed {
        step: step.to_string(),
        reason: reason.into(),
    })
}
