use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole: {0} vanishes")]
    Pole(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("undeclared root symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("expected {expected} {what}, got {got}")]
    Arity {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("no admissible root: {0}")]
    NoRoot(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("outside domain: {0}")]
    Domain(String),
}

impl Error {
    /// Rename a bare division failure after the denominator that caused it.
    pub fn at(self, what: &str) -> Error {
        match self {
            Error::DivisionByZero => Error::Pole(what.to_string()),
            other => other,
        }
    }
}
