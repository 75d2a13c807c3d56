//! Experiment harness for quantum random access code classifiers: JSON
//! configs, cross-validation, permutation search, metrics and CSV artifacts.

pub mod config;
pub mod experiment;
pub mod metrics;
pub mod report;

pub use config::ExperimentConfig;
pub use experiment::{permutation_search, run_experiment, RunOptions, Summary};
