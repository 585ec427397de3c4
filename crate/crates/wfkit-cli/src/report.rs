//! Machine-readable run reports: the command, hashes of every input, the
//! flattened configuration, and the reported metrics. Every metric in a
//! report also appears in the command's primary output file.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputHash>,
    pub config: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    pub wall_time_s: f64,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of one file.
pub fn hash_file(path: &Path) -> std::io::Result<InputHash> {
    let bytes = std::fs::read(path)?;
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: hex(&Sha256::digest(&bytes)),
    })
}

/// Combined SHA-256 over a directory's `.json` files: file names and bytes
/// in lexicographic order, so the hash pins the whole dataset.
pub fn hash_json_dir(path: &Path) -> std::io::Result<InputHash> {
    let mut names: Vec<_> = std::fs::read_dir(path)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let mut hasher = Sha256::new();
    for file in names {
        hasher.update(file.file_name().unwrap().to_string_lossy().as_bytes());
        hasher.update(b"\0");
        hasher.update(std::fs::read(&file)?);
    }
    Ok(InputHash {
        path: path.display().to_string(),
        sha256: hex(&hasher.finalize()),
    })
}

pub fn write_report(report: &RunReport, path: &Path) -> std::io::Result<()> {
    let mut body = serde_json::to_string_pretty(report).expect("report serialization");
    body.push('\n');
    std::fs::write(path, body)
}
