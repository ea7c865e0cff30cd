use crate::structures::Signature;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("signature mismatch: expected {expected}, found {found}")]
    SignatureMismatch {
        expected: Signature,
        found: Signature,
    },
    #[error("inconsistent diagram: {0}")]
    Inconsistent(String),
    #[error("not a total order: {0}")]
    NotTotal(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("element id overflow while encoding outputs")]
    Overflow,
    #[error("{0} does not mention output elements at this budget")]
    NotInOutput(String),
    #[error("output shrank between stages {prev} and {stage}")]
    NonMonotone { prev: usize, stage: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
