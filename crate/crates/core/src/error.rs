use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {p} divides |W| = {weyl_order}")]
    BadCharacteristic { p: u32, weyl_order: u64 },
    #[error("character of order {0} is not supported (order must be at most 4)")]
    UnsupportedOrder(u64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("wild ramification: p = {p} divides ramification index {e}")]
    WildRamification { p: u32, e: usize },
    #[error("factors are not coprime modulo the uniformizer")]
    NotCoprime,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("transferred characteristic is not G-regular")]
    NotGRegular,
    #[error("characteristic is not regular semisimple (discriminant vanishes)")]
    NotRegular,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("candidate count exceeded guard of {0}")]
    CombinatorialBlowup(u64),
    #[error("kappa does not factor through the component group: {0}")]
    UnsupportedKappa(String),
    #[error("unsupported endoscopic group: {0}")]
    UnsupportedH(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}
