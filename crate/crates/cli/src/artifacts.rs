//! Run directory output with a hash manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::commands::Failure;

#[derive(Debug, Serialize)]
struct Entry {
    file: String,
    sha256: String,
    bytes: usize,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    artifacts: Vec<Entry>,
}

/// Collects files for one run directory; `finish` writes them plus `manifest.json`.
pub struct RunDir {
    root: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl RunDir {
    pub fn new(root: &Path) -> Self {
        RunDir { root: root.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), contents.into()));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        self.add(name, to_json(value));
    }

    pub fn finish(mut self) -> Result<(), Failure> {
        fs::create_dir_all(&self.root)
            .map_err(|e| Failure::Io(format!("cannot create {}: {}", self.root.display(), e)))?;
        let manifest = Manifest {
            tool: "orthoising",
            version: env!("CARGO_PKG_VERSION"),
            artifacts: self
                .files
                .iter()
                .map(|(name, data)| Entry { file: name.clone(), sha256: hex::encode(Sha256::digest(data)), bytes: data.len() })
                .collect(),
        };
        self.add_json("manifest.json", &manifest);
        for (name, data) in &self.files {
            let path = self.root.join(name);
            fs::write(&path, data).map_err(|e| Failure::Io(format!("cannot write {}: {}", path.display(), e)))?;
        }
        Ok(())
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}
