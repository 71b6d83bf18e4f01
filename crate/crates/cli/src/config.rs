//! Experiment configuration files.
//!
//! A config is a single JSON document mirroring `ExperimentConfig` field
//! names. `load_config` also accepts a run manifest and extracts its
//! embedded resolved config, so any previous run reproduces directly.

use std::fs;
use std::path::Path;

use retrolab_core::sim::{ExperimentConfig, Model};

use crate::error::CliError;

/// Fallback seed when neither `--seed` nor `RETROLAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;
/// Default event count for `simulate`.
pub const DEFAULT_SIMULATE_EVENTS: u64 = 100_000;
/// Default event count per model for `discriminate`.
pub const DEFAULT_DISCRIMINATE_EVENTS: u64 = 1_000_000;

/// The out-of-the-box configuration: time-ordering-2 bench at the
/// discrimination phase preset.
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig::preset(Model::Qm, DEFAULT_SIMULATE_EVENTS, DEFAULT_SEED)
}

/// Read a config file, or the `config` field of a run manifest.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed config {}: {e}", path.display())))?;
    let config_value = match value.get("command").and(value.get("config")) {
        Some(embedded) => embedded.clone(),
        None => value,
    };
    serde_json::from_value(config_value)
        .map_err(|e| CliError::Config(format!("malformed config {}: {e}", path.display())))
}
