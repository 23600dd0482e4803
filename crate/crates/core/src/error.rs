use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index {index} out of range (table holds 1..={len})")]
    Range { index: usize, len: usize },
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("precision not reached: {0}")]
    Precision(String),
    #[error("series truncation order {order} is below the required {needed}")]
    TruncationOrder { order: usize, needed: usize },
    #[error("local factor series diverges: {0}")]
    Divergence(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("least-squares system is rank deficient: {0}")]
    RankDeficient(String),
    #[error("corrupt table file {path}: {reason}")]
    Corruption { path: PathBuf, reason: String },
    #[error("observable is not bounded: {0}")]
    UnboundedObservable(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
