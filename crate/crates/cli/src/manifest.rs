//! Reproducibility manifests written next to every generated file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};
use crate::fsio::{self, FileDigest};

pub const TOOL: &str = "colloq";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    /// Every setting that influences the outputs.
    pub parameters: BTreeMap<String, Value>,
    pub master_seed: Option<u64>,
    pub threshold: Option<f64>,
    pub started_at: String,
    pub finished_at: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl Manifest {
    pub fn start(command: &str) -> Self {
        Self {
            tool: TOOL.to_owned(),
            tool_version: TOOL_VERSION.to_owned(),
            command: command.to_owned(),
            parameters: BTreeMap::new(),
            master_seed: None,
            threshold: None,
            started_at: now(),
            finished_at: String::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_owned(), value.into());
    }

    pub fn input(&mut self, role: &str, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest::of_bytes(role, path, bytes));
    }

    pub fn output(&mut self, role: &str, path: &Path, bytes: &[u8]) {
        self.outputs.push(FileDigest::of_bytes(role, path, bytes));
    }

    pub fn digest_of(&self, role: &str) -> Option<&str> {
        self.outputs.iter().find(|d| d.role == role).map(|d| d.sha256.as_str())
    }

    /// Stamps the finish time and writes the manifest as JSON.
    pub fn finish(mut self, path: &Path) -> Result<Self> {
        self.finished_at = now();
        let mut json = serde_json::to_string_pretty(&self).expect("manifest serializes");
        json.push('\n');
        fsio::write_atomic(path, json.as_bytes())?;
        Ok(self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fsio::read_text(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// `<output>.<suffix>`, e.g. `train.tsv.manifest.json`.
pub fn sidecar(output: &Path, suffix: &str) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}
