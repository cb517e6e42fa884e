use thiserror::Error;

/// Errors produced by the exact and numerical pipelines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("cyclotomic order mismatch: {0}")]
    OrderMismatch(String),

    #[error("shift operator: {0} is not divisible by q^x - q^-x")]
    NonDivisible(String),

    #[error("vanishing divisor q^-{m} - q^{m} in shift-operator chain")]
    VanishingDivisor { m: i64 },

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("branch tracking failed: {0}")]
    Branch(String),

    #[error("invalid parameters: {0}")]
    Invalid(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Cache(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
