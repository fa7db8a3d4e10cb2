//! Config-driven experiments over `calvs-core`: replicate orchestration,
//! CSV/JSON output and the packaged reproduction suites.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod suites;
pub mod summary;

pub use commands::{execute, Command, Report};
pub use config::ExperimentConfig;
pub use error::{ExpError, Result};
