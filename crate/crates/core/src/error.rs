use thiserror::Error;

/// Broad category of an [`Error`], used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input is well-formed but violates a mathematical precondition.
    Domain,
    /// An enumeration or size budget would be exceeded.
    Resource,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid modulus {0}: must be at least 2")]
    InvalidModulus(u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("operation requires an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix entry at ({row}, {col}) is {value}, expected 0 or 1")]
    NotBinary { row: usize, col: usize, value: u64 },
    #[error("rows {0} and {1} are equal")]
    DuplicateRows(usize, usize),
    #[error("columns {0} and {1} are equal")]
    DuplicateColumns(usize, usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("not an oddtown family: {0}")]
    NotOddtown(String),
    #[error("prime index {index} out of range for {omega} prime factors")]
    BadPrimeIndex { index: usize, omega: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget { what: &'static str, needed: f64, budget: u64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Budget { .. } => ErrorKind::Resource,
            _ => ErrorKind::Domain,
        }
    }

    pub(crate) fn budget(what: &'static str, needed: f64, budget: u64) -> Self {
        Error::Budget { what, needed, budget }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
