use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("schedule has {found} days, instance has {expected}")]
    DayCountMismatch { expected: usize, found: usize },

    #[error("day {day}: ordering is not a permutation of the {n} clients")]
    NotAPermutation { day: usize, n: usize },

    #[error("operation requires a day-invariant instance")]
    RequiresDayInvariant,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("value {value} exceeds the capacity grid maximum {max}")]
    AboveGrid { value: String, max: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
