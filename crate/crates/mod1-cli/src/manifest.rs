//! Run manifests: every CSV written to disk is accompanied by a JSON record
//! of the command, the resolved configuration, and a digest of the output.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

#[derive(Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<OutputDigest>,
    pub wall_ms: u128,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// `runs/foo.csv` gets its manifest at `runs/foo.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut p = output.to_path_buf();
    p.set_extension("manifest.json");
    p
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.to_string(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            wall_ms: 0,
        }
    }

    pub fn record_output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json)
    }
}
