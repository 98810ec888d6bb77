use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(usize),
    #[error("extension degree must be at least 1, got {0}")]
    InvalidDegree(usize),
    #[error("dimension {0} is not admissible: {1}")]
    InvalidDimension(usize, &'static str),
    #[error("element {value} out of range for dimension {dim}")]
    OutOfRange { value: usize, dim: usize },
    #[error("division by 2 is undefined in even characteristic (dimension {0})")]
    EvenCharacteristic(usize),
    #[error("operation requires {expected} mode")]
    WrongMode { expected: &'static str },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} is not a perfect square")]
    NotSquare(usize),
    #[error("class index {class} out of range 0..={max}")]
    InvalidClass { class: usize, max: usize },
    #[error("basis index {k} out of range for this operation")]
    InvalidBasis { k: usize },
    #[error("operator is not hermitian: imaginary part {0:.3e}")]
    NotHermitian(f64),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
