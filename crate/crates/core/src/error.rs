use thiserror::Error;

/// Errors raised by the oracles, estimators and bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid hypothesis: {0}")]
    InvalidHypothesis(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid finite class table: {0}")]
    InvalidTable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sample is not realizable by the concept class")]
    Infeasible,

    #[error("subset is not contained in the sample")]
    NotSubset,

    #[error("{oracle} does not support {what}")]
    Unsupported { oracle: &'static str, what: String },

    #[error("{0}: no exact computation available, use monte_carlo")]
    UseMonteCarlo(&'static str),

    #[error("{0} only yields an estimate; pass estimate options explicitly")]
    EstimateOnly(&'static str),

    #[error("compression set is not certified minimal")]
    Uncertified,

    #[error("stream cap of {0} points reached")]
    CapHit(usize),

    #[error("no grid value satisfied the success criterion")]
    GridExhausted,

    #[error("too many candidates for exact enumeration ({0})")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn unsupported(oracle: &'static str, what: impl Into<String>) -> Self {
        Error::Unsupported {
            oracle,
            what: what.into(),
        }
    }
}
