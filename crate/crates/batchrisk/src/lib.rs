//! File formats, verification harness, experiments and the command line for
//! batched-prediction k-risk. The numerical work lives in `batchrisk-core`,
//! re-exported here as [`core`].

pub use batchrisk_core as core;

pub mod cli;
pub mod counterexample;
mod error;
pub mod io;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};

/// Library version recorded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
