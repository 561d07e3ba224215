//! Run directories: `timeseries.csv`, `summary.json`, `scenario.json` and
//! `provenance.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::exit::Failure;

#[derive(Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
    /// SHA-256 of `scenario.json`.
    pub config_hash: String,
    pub command: Vec<String>,
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn provenance(scenario_json: &str) -> Provenance {
    Provenance {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config_hash: config_hash(scenario_json),
        command: std::env::args().collect(),
    }
}

pub fn create_dir(dir: &Path) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(&format!("creating {}", dir.display()), e))?;
    Ok(dir.to_path_buf())
}

pub fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::io(&format!("writing {}", path.display()), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(zeno_core::Error::from)?;
    text.push('\n');
    write(path, &text)
}

/// Write `scenario.json` and `provenance.json` into `dir`.
pub fn write_config(dir: &Path, scenario_json: &str) -> Result<(), Failure> {
    let mut text = scenario_json.to_string();
    text.push('\n');
    write(&dir.join("scenario.json"), &text)?;
    write_json(&dir.join("provenance.json"), &provenance(&text))
}
