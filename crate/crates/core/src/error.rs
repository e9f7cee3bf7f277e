use thiserror::Error;

use crate::quotient::ConditionViolation;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("sublattice is not contained in the ambient lattice")]
    NotContained,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("exponent matrix rejected: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    ExponentMatrix(Vec<ConditionViolation>),
    #[error("degenerate covering: the reduced kernel matrix is singular")]
    DegenerateCovering,
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget { what: &'static str, needed: u128, limit: u128 },
    #[error("theory violation: {0}")]
    TheoryViolation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
