use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::model::Config;
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_SNAPSHOT: &str = "config.toml";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFailure {
    pub task: String,
    pub error: String,
    pub numeric: bool,
}

/// Record of one CLI run. Re-running `command` with the stored config
/// snapshot and sweep reproduces every listed file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: Config,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub jx: Vec<f64>,
    pub axes: Vec<String>,
    pub sets: Vec<String>,
    pub workers: usize,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<OutputEntry>,
    pub failures: Vec<TaskFailure>,
}

pub(crate) fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn relative(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            walk(&p, out)?;
        } else {
            out.push(p);
        }
    }
    Ok(())
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }

    pub fn is_success(&self) -> bool {
        self.failures.is_empty()
    }

    /// Checks that every file under `dir` other than the manifest is
    /// listed, and that every listed file exists with its recorded hash.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        let mut files = Vec::new();
        walk(dir, &mut files)?;
        let mut on_disk: Vec<String> = files.iter().map(|p| relative(dir, p)).filter(|p| p != MANIFEST_FILE).collect();
        on_disk.sort();
        let mut listed: Vec<String> = self.outputs.iter().map(|o| o.path.clone()).collect();
        listed.sort();
        if on_disk != listed {
            return Err(Error::Numeric(format!("manifest lists {listed:?}, directory holds {on_disk:?}")));
        }
        for o in &self.outputs {
            let got = sha256_hex(&std::fs::read(dir.join(&o.path))?);
            if got != o.sha256 {
                return Err(Error::Numeric(format!("{} changed since the run", o.path)));
            }
        }
        Ok(())
    }
}
