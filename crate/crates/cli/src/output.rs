use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Artifacts are buffered and only land on disk once the command succeeded.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, path: &Path, bytes: Vec<u8>) {
        self.files.push((path.to_path_buf(), bytes));
    }

    /// Writes every artifact, then a manifest echoing the resolved config and
    /// the artifact hashes. Each file goes through a temp file and a rename;
    /// on failure the files already written are removed again.
    pub fn commit(
        mut self,
        command: &str,
        config: &Map<String, Value>,
        notes: Map<String, Value>,
        manifest: &Path,
    ) -> Result<(), CliError> {
        let hashes: Map<String, Value> = self
            .files
            .iter()
            .map(|(p, b)| (p.display().to_string(), Value::String(sha256_hex(b))))
            .collect();
        let mut doc = json!({ "command": command, "config": config, "artifacts": hashes });
        if !notes.is_empty() {
            doc["notes"] = Value::Object(notes);
        }
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("manifest serializes");
        bytes.push(b'\n');
        self.files.push((manifest.to_path_buf(), bytes));

        let mut written: Vec<&Path> = Vec::new();
        for (path, bytes) in &self.files {
            if let Err(e) = write_atomic(path, bytes) {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e);
            }
            written.push(path);
        }
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
