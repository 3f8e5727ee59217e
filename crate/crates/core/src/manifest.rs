//! Run manifests.
//!
//! Every CLI run emits a manifest pinning the command, the digests of its
//! input files, the parameters, and the seed, so that identical manifests
//! (same digests, params, seed) produce byte-identical output files.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub outputs: Vec<String>,
    pub timing_ms: u128,
    #[serde(skip)]
    started: Option<std::time::Instant>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: serde_json::Value::Null,
            seed,
            outputs: Vec::new(),
            timing_ms: 0,
            started: Some(Instant::now()),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn set_parameters(&mut self, params: serde_json::Value) {
        self.parameters = params;
    }

    /// Stamps the elapsed time and writes the manifest as pretty JSON.
    pub fn write(&mut self, path: &Path) -> std::io::Result<()> {
        if let Some(started) = self.started {
            self.timing_ms = started.elapsed().as_millis();
        }
        std::fs::write(path, serde_json::to_string_pretty(self).unwrap())
    }
}
