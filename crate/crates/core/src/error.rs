use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("invalid nodes: {0}")]
    InvalidNodes(String),

    #[error("invalid order k = {0}; the family requires k >= 1")]
    InvalidOrder(usize),

    #[error("invalid degree n = {0}; the model requires n >= 1")]
    InvalidDegree(usize),

    #[error("invalid problem: coefficient index p = {p} must satisfy 1 <= p <= n = {n}")]
    InvalidProblem { n: usize, p: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate Lagrange coefficient at support index {index} (|a| = {value:e})")]
    DegenerateCoefficient { index: usize, value: f64 },

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("design failed its optimality self-check: {0}")]
    UnverifiedDesign(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),
}

pub type Result<T> = std::result::Result<T, DesignError>;
