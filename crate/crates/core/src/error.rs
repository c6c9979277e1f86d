use thiserror::Error;

/// Errors produced by the simulator library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported matrix dimension {0} (only 2, 4 and 6 are used)")]
    UnsupportedDimension(usize),

    #[error("non-finite entry (NaN or Inf)")]
    NonFinite,

    #[error("cannot compare against an identically zero matrix")]
    ZeroMatrix,

    #[error("matrix `{0}` is not unitary")]
    NonUnitary(String),

    #[error("gate circuit is empty")]
    EmptyCircuit,

    #[error("q-plate changes |m| and cannot act on the 4-dimensional coin space")]
    QPlateOnCoinSpace,

    #[error("amplitude would leave the m in {{-1,0,+1}} truncation (index {0})")]
    TruncationLeak(usize),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid optical element parameter: {0}")]
    BadElement(String),

    #[error("segment length N = {0} must be an odd integer >= 3")]
    EvenSegmentLength(i64),

    #[error("step budget exceeded: {steps} steps, but zero overlap requires <= {max}")]
    StepBudgetExceeded { steps: i64, max: i64 },

    #[error("unknown coin `{0}`")]
    UnknownCoin(String),

    #[error("unknown initial state `{0}`")]
    UnknownInitialState(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("steps must be >= 0, got {0}")]
    NegativeSteps(i64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
