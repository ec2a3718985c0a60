//! Experiment runner for the satgraph classifier: training, evaluation,
//! ablations, label-noise sweeps and synthetic data generation.
//!
//! Exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::{Ablation, RunConfig};
pub use error::CliError;
