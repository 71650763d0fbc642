use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clause_core::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct FileRecord {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct ConfigRecord {
    /// File path, or `preset:NAME`, or `model:PATH` for a bundled config.
    pub source: String,
    pub overrides: Vec<String>,
    /// Hash of the resolved configuration in canonical form.
    pub sha256: String,
}

/// Provenance record written next to every output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub range_convention: String,
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigRecord>,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub elapsed_seconds: f64,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn start(command: &str, range_convention: String, threads: usize) -> Self {
        RunManifest {
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            range_convention,
            threads,
            config: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            rng_seed: None,
            elapsed_seconds: 0.0,
            started: Some(Instant::now()),
        }
    }

    pub fn input(&mut self, role: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        self.inputs.push(FileRecord {
            role: role.into(),
            path: path.to_path_buf(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    /// Writes `bytes` to `path` and records it.
    pub fn output(&mut self, role: &str, path: &Path, bytes: &[u8]) -> Result<()> {
        fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
        self.outputs.push(FileRecord {
            role: role.into(),
            path: path.to_path_buf(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn finish(mut self, path: &Path) -> Result<()> {
        if let Some(t) = self.started.take() {
            self.elapsed_seconds = t.elapsed().as_secs_f64();
        }
        let mut text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// `out.tsv` -> `out.tsv.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
