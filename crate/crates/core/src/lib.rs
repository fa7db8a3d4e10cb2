//! Disagreement-based active learning in simulation: version-space oracles,
//! compression sets, disagreement coefficients and the CAL query process.

pub mod agnostic;
pub mod bounds;
pub mod cal;
pub mod coefficients;
pub mod compression;
pub mod dist;
pub mod error;
pub mod geometry;
pub mod quantile;

pub use error::{Error, Result};
