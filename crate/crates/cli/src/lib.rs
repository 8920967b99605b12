//! Experiment orchestration for the scattering laboratory: the four named
//! experiments (E1-E4), utility subcommands, CSV/JSON serialization and the
//! run manifest.

pub mod config;
pub mod experiments;
pub mod output;
pub mod report;

pub use report::{Check, ExperimentReport};
