//! Run metadata: every command writes a `manifest.json` echoing the full
//! config (defaults included), SHA-256 digests of the inputs it read,
//! the names and row counts of what it wrote, and the wall time.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::format::write_json;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<String>,
    pub row_counts: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
    /// The only field that varies between byte-identical reruns.
    pub wall_time_ms: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::new(), |mut acc, b| {
        acc.push_str(&format!("{b:02x}"));
        acc
    })
}

/// Collects manifest entries while a command runs, then writes
/// `manifest.json` into the output directory.
pub struct ManifestBuilder {
    start: Instant,
    command: String,
    config: RunConfig,
    inputs: Vec<FileDigest>,
    outputs: Vec<String>,
    row_counts: BTreeMap<String, u64>,
    warnings: Vec<String>,
}

impl ManifestBuilder {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            start: Instant::now(),
            command: command.to_owned(),
            config: config.clone(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            row_counts: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    /// Digests an input file as read from disk.
    pub fn input(&mut self, path: &Path) -> Result<()> {
        let bytes = std::fs::read(path).map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })?;
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn output(&mut self, name: &str) {
        self.outputs.push(name.to_owned());
    }

    pub fn rows(&mut self, name: &str, count: usize) {
        self.row_counts.insert(name.to_owned(), count as u64);
    }

    pub fn warning(&mut self, message: &str) {
        self.warnings.push(message.to_owned());
    }

    pub fn write(self, out_dir: &Path) -> Result<PathBuf> {
        let manifest = RunManifest {
            tool: "smokeshift".to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            command: self.command,
            config: self.config,
            inputs: self.inputs,
            outputs: self.outputs,
            row_counts: self.row_counts,
            warnings: self.warnings,
            wall_time_ms: self.start.elapsed().as_millis() as u64,
        };
        let path = out_dir.join("manifest.json");
        write_json(&path, &manifest)?;
        Ok(path)
    }
}
