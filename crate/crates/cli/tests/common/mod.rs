#![allow(dead_code)]

use std::path::PathBuf;

use qracvqc_cli::{ExperimentConfig, RunOptions};

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn data_dir() -> PathBuf {
    workspace().join("data")
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs")
}

pub fn golden(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&configs_dir().join(format!("{name}.json"))).unwrap()
}

pub fn opts() -> RunOptions {
    RunOptions { data_dir: Some(data_dir()), ..RunOptions::default() }
}
