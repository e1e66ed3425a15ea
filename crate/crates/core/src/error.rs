use thiserror::Error;

/// Errors raised by the analytics in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed dataset: {0}")]
    MalformedInput(String),

    #[error("empty history")]
    EmptyHistory,

    #[error("insufficient history for {model}: need {needed} months, have {available}")]
    InsufficientHistory {
        model: String,
        needed: usize,
        available: usize,
    },

    #[error("history does not extend the fitted series: {0}")]
    HistoryMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("duplicate model id {0:?}")]
    DuplicateModel(String),

    #[error("unknown model kind {0:?}")]
    UnknownModel(String),

    #[error("empty model list")]
    NoModels,

    #[error("empty selection")]
    EmptySelection,

    #[error("all ranking weights are zero")]
    ZeroWeights,

    #[error("unknown product {0:?}")]
    UnknownProduct(String),

    #[error("length mismatch: {id_a} has {len_a} values, {id_b} has {len_b}")]
    LengthMismatch {
        id_a: String,
        id_b: String,
        len_a: usize,
        len_b: usize,
    },

    #[error("need at least {needed} series, got {available}")]
    TooFewSeries { needed: usize, available: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("series too short for seasonal decomposition")]
    TooShortForDecomposition,

    #[error("series too short: need {needed} values, have {available}")]
    TooShort { needed: usize, available: usize },

    #[error("zero variance")]
    ZeroVariance,

    #[error("degenerate regression")]
    DegenerateRegression,

    #[error("target month {0} has no usable history")]
    NoUsableHistory(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
