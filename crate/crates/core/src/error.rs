use thiserror::Error;

use crate::traces::FlowId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid packet sequence: {0}")]
    InvalidSequence(String),
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("flow {flow} has fewer than {count} packets")]
    FlowAbsent { flow: FlowId, count: usize },
    #[error("prefix too short to evaluate packet {index}")]
    InsufficientPrefix { index: usize },
    #[error("expected a single-flow sequence, found flows {0:?}")]
    NotSingleFlow(Vec<FlowId>),
    #[error("no regulation operator bound to flow {0}")]
    MissingOperator(FlowId),
    #[error("mismatched sequences: {0}")]
    Mismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
