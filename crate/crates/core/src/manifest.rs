//! JSON sidecar describing how an output file was produced.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::model::NetworkConfig;

#[derive(Debug, Clone, Serialize)]
pub struct OutputChecksum {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub config: NetworkConfig,
    pub seed: u64,
    pub reps: u64,
    pub workers: Option<usize>,
    /// Extra parameters of the run, such as a sweep grid.
    pub parameters: serde_json::Value,
    pub started_unix: f64,
    pub elapsed_seconds: f64,
    pub outputs: Vec<OutputChecksum>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

impl RunManifest {
    pub fn checksum(path: &Path, bytes: &[u8]) -> OutputChecksum {
        OutputChecksum { path: path.display().to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 }
    }

    /// `out.csv` gets `out.csv.manifest.json`.
    pub fn sidecar_path(output: &Path) -> PathBuf {
        let mut name = output.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}
