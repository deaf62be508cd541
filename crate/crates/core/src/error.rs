use alloc::boxed::Box;
use alloc::string::String;

use crate::losses::LossKind;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{role} value {value} outside the {kind} domain")]
    InputDomain {
        kind: LossKind,
        role: &'static str,
        value: f64,
    },

    #[error("length mismatch: {predictions} predictions vs {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },

    #[error("empty batch")]
    EmptyBatch,

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(
        "exact evaluation needs {required} terms, above the cap of {cap}; \
         use the closed form or Monte-Carlo estimation"
    )]
    Budget { required: u128, cap: u128 },

    #[error("{kind} is not supported by {operation}")]
    UnsupportedLoss {
        kind: LossKind,
        operation: &'static str,
    },

    #[error("binomial coefficient C({n},{k}) overflows 128 bits")]
    Overflow { n: u64, k: u64 },

    #[error("hypothesis {variant} cannot be used with task {task}")]
    TaskMismatch {
        variant: &'static str,
        task: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("at index {index} (k = {k}): {source}")]
    AtIndex {
        index: usize,
        k: usize,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}
