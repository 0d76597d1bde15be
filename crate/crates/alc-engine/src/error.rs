use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid Dynkin type: {0}")]
    InvalidType(String),
    #[error("invalid rank {rank} for family {family}: {bound}")]
    InvalidRank {
        family: char,
        rank: usize,
        bound: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weight is not dominant: {0}")]
    NotDominant(String),
    #[error("weight is not integral: {0}")]
    NotIntegral(String),
    #[error("invalid node set: {0}")]
    InvalidNodes(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
