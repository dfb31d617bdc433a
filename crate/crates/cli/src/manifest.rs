//! Run manifests: what was run, with which moduli, and digests of every
//! file it produced.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub moduli: Vec<u64>,
    pub verification_modulus: Option<u64>,
    pub wall_time_seconds: f64,
    pub peak_states: Option<u64>,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: Map::new(),
            moduli: Vec::new(),
            verification_modulus: None,
            wall_time_seconds: 0.0,
            peak_states: None,
            outputs: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn record(&mut self, path: &Path) -> io::Result<()> {
        let data = fs::read(path)?;
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            bytes: data.len() as u64,
            sha256: sha256_hex(&data),
        });
        Ok(())
    }

    pub fn finish(&mut self, elapsed: Duration) {
        self.wall_time_seconds = elapsed.as_secs_f64();
    }

    /// The manifest itself is not listed among the outputs.
    pub fn write(&self, path: &Path) -> io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(path, text)
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// `<file>.manifest.json` next to a single output file.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn manifest_path_keeps_directory() {
        assert_eq!(
            manifest_path_for(Path::new("runs/p30.txt")),
            PathBuf::from("runs/p30.txt.manifest.json")
        );
    }
}
