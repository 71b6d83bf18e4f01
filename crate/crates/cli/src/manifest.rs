//! Run manifests.
//!
//! Every command writes a manifest beside its outputs: the command name, the
//! fully resolved configuration, the seed (when the command is stochastic),
//! the artifact version, the produced files, and the wall-clock duration.
//! Feeding a manifest back through `--config` reproduces the run bit-exactly
//! for the recorded seed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub artifact_version: String,
    pub outputs: Vec<String>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_owned(),
            config,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_owned(),
            outputs: Vec::new(),
            duration_s: 0.0,
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Serialize to `<dir>/manifest.json`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        fs::create_dir_all(dir)?;
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
