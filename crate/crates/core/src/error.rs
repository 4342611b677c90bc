use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: feature index {index} does not increase (previous {previous})")]
    NonIncreasingIndex {
        line: usize,
        index: u32,
        previous: u32,
    },

    #[error("dataset has {positives} positive and {negatives} negative instances; both classes are required")]
    MissingClass { positives: usize, negatives: usize },

    #[error("sampling rate {0} is outside (0, 1]")]
    RateOutOfRange(f64),

    #[error("class with {size} instances cannot be split into {folds} folds")]
    ClassTooSmall { size: usize, folds: usize },

    #[error("weight vector has length {actual}, dataset dimension is {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty score list for the {0} class")]
    EmptyClass(&'static str),

    #[error("cost budget already exhausted")]
    BudgetExhausted,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("rank correlation is undefined for a constant vector")]
    ConstantVector,

    #[error("need at least {required} samples per group, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
