use thiserror::Error;

/// Errors raised by the library. Parse failures and domain failures are
/// kept apart so front ends can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty vector")]
    Empty,

    #[error("entry {index} is not strictly positive")]
    NonPositiveEntry { index: usize },

    #[error("weight {index} is negative")]
    NegativeWeight { index: usize },

    #[error("all weights are zero")]
    ZeroWeights,

    #[error("first weight must be strictly positive")]
    FirstWeightNotPositive,

    #[error("weight {index} is zero; eliminate zero-weight entries first")]
    ZeroWeight { index: usize },

    #[error("weight {index} is not an integer")]
    NonIntegerWeight { index: usize },

    #[error("weight {index} is not an exact rational")]
    NonRationalWeight { index: usize },

    #[error("non-finite float value")]
    NonFinite,

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("elimination needs a zero weight at index {index}")]
    WeightNotZero { index: usize },

    #[error("elimination needs at least two entries")]
    TooShort,

    #[error("sequence is not nonincreasing at position {index}")]
    NotNonincreasing { index: usize },

    #[error("invalid interval [{lo}, {hi})")]
    InvalidInterval { lo: String, hi: String },

    #[error("mean {0} is not homogeneous")]
    NotHomogeneous(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("repetition count {0} too large for lifting")]
    TooManyRepetitions(u128),
}

impl Error {
    /// True for malformed input text, false for well-formed input outside
    /// the domain of the operation.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
