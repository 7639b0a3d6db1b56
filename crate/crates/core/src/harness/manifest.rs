use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the manifest's directory.
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one run, written as `manifest.json` next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub code_version: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// `completed`, `aborted` or `resumed`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub files: Vec<FileEntry>,
    /// `(check name, passed)`
    pub checks: Vec<(String, bool)>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        write!(s, "{b:02x}").expect("write to string");
    }
    s
}

pub(crate) fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

impl RunManifest {
    pub fn entry(dir: &Path, name: &str) -> Result<FileEntry> {
        let bytes = std::fs::read(dir.join(name))?;
        Ok(FileEntry {
            path: PathBuf::from(name),
            sha256: sha256_hex(&bytes),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), text + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(dir.join("manifest.json"))?;
        serde_json::from_str(&text).map_err(|e| crate::error::Error::Format {
            path: dir.join("manifest.json"),
            reason: e.to_string(),
        })
    }

    /// Files listed in the manifest whose checksum no longer matches (or
    /// that are missing).
    pub fn stale_files(&self, dir: &Path) -> Vec<PathBuf> {
        self.files
            .iter()
            .filter(|f| match std::fs::read(dir.join(&f.path)) {
                Ok(bytes) => sha256_hex(&bytes) != f.sha256,
                Err(_) => true,
            })
            .map(|f| f.path.clone())
            .collect()
    }

    pub fn all_checks_passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn stale_files_detects_edits() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "1\n").unwrap();
        let m = RunManifest {
            code_version: "0".into(),
            config: serde_json::Value::Null,
            config_hash: "0".into(),
            seed: 0,
            started_unix: 0.0,
            finished_unix: 0.0,
            status: "completed".into(),
            error: None,
            files: vec![RunManifest::entry(dir.path(), "a.csv").unwrap()],
            checks: vec![],
        };
        assert!(m.stale_files(dir.path()).is_empty());
        m.write(dir.path()).unwrap();
        assert_eq!(RunManifest::read(dir.path()).unwrap(), m);
        std::fs::write(dir.path().join("a.csv"), "2\n").unwrap();
        assert_eq!(m.stale_files(dir.path()), vec![PathBuf::from("a.csv")]);
    }
}
