//! Run manifests: enough resolved state to replay any successful run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::report::ReportError;

/// Written next to every subcommand's primary output. Re-running the
/// subcommand with the recorded configuration and inputs reproduces the
/// outputs byte for byte (the manifest itself carries the wall-clock
/// duration, so only the data files are compared).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: Value,
    pub input_hashes: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub duration_ms: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: Value, started: Instant) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config,
            input_hashes: BTreeMap::new(),
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: started.elapsed().as_millis() as u64,
        }
    }

    pub fn with_input(mut self, path: &Path, hash: String) -> Self {
        self.input_hashes.insert(path.display().to_string(), hash);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn write(&self, path: &Path) -> Result<(), ReportError> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        std::fs::write(path, &bytes).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// `report.json` -> `report.manifest.json`; directories get
/// `manifest.json` inside.
pub fn manifest_path(out: &Path) -> PathBuf {
    if out.is_dir() {
        out.join("manifest.json")
    } else {
        out.with_extension("manifest.json")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_records_inputs_and_version() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.manifest.json");
        RunManifest::new("simulate", serde_json::json!({"samples": 10}), Instant::now())
            .with_input(Path::new("config.json"), "abc123".into())
            .with_seed(7)
            .write(&path)
            .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["subcommand"], "simulate");
        assert_eq!(value["input_hashes"]["config.json"], "abc123");
        assert_eq!(value["seed"], 7);
        assert_eq!(value["tool_version"], env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn manifest_path_for_files_and_directories() {
        assert_eq!(
            manifest_path(Path::new("out/report.json")),
            PathBuf::from("out/report.manifest.json")
        );
    }
}
