use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] calvs_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T> = std::result::Result<T, ExpError>;

/// Process exit status for a completed run whose assertions failed.
pub const EXIT_ASSERTION: i32 = 1;
/// Process exit status for an unusable config, class/distribution pairing or output path.
pub const EXIT_CONFIG: i32 = 2;

impl ExpError {
    /// Exit status: configuration-type errors map to 2, failed computations to 1.
    pub fn exit_code(&self) -> i32 {
        use calvs_core::Error as E;
        match self {
            ExpError::Config(_) | ExpError::Io { .. } | ExpError::Pool(_) => EXIT_CONFIG,
            ExpError::Core(
                E::DimensionMismatch { .. }
                | E::NonFinite(_)
                | E::InvalidHypothesis(_)
                | E::InvalidDistribution(_)
                | E::InvalidTable(_)
                | E::InvalidArgument(_)
                | E::Unsupported { .. }
                | E::UseMonteCarlo(_)
                | E::EstimateOnly(_)
                | E::TooLarge(_),
            ) => EXIT_CONFIG,
            ExpError::Core(_) | ExpError::Csv(_) => EXIT_ASSERTION,
        }
    }
}
