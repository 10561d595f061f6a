//! Run manifests written next to every output file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliResult;

/// Provenance of one command invocation. The timestamp and runtime live here
/// and not in the result files, so those stay byte-identical across reruns.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub library_version: String,
    /// SHA-256 of the input data file, hex encoded.
    pub input_digest: Option<String>,
    pub outputs: Vec<PathBuf>,
    pub workers: Option<usize>,
    pub runtime_secs: Option<f64>,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value, seeds: Vec<u64>) -> Self {
        Self {
            command: command.to_string(),
            config,
            seeds,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: None,
            outputs: Vec::new(),
            workers: None,
            runtime_secs: None,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        fs::write(path, text + "\n")?;
        Ok(())
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `<path>.manifest.json`, keeping the original extension in the name.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}
