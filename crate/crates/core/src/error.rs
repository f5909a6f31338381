use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid action set: {0}")]
    InvalidActionSet(String),

    #[error("invalid frequency vector {counts:?}: {reason}")]
    InvalidFrequency { counts: Vec<usize>, reason: String },

    #[error("incomplete utility table, missing {} entries: {}", missing.len(), missing.join(", "))]
    IncompleteTable { missing: Vec<String> },

    #[error("conflicting utility entries for {key}: {first} vs {second}")]
    ConflictingEntry { key: String, first: String, second: String },

    #[error("malformed rational: {0:?}")]
    MalformedRational(String),

    #[error("unknown action label {0:?}")]
    UnknownAction(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("alpha {alpha} out of range 0..={max}")]
    AlphaOutOfRange { alpha: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cap {cap} exceeded: {requested} > {limit}")]
    CapExceeded {
        cap: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("invalid game document: {0}")]
    InvalidDocument(String),
}
