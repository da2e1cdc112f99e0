//! Run manifests: config snapshot plus artifact hashes.
//!
//! Every stage writes one so a run can be audited and reproduced. The
//! manifest holds no timestamps or absolute paths, only file names and
//! content hashes: identical inputs and config give identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::{PipelineError, Result};

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(format!("{:x}", hasher.finalize()))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn hash_map(paths: &[&Path]) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for p in paths {
        map.insert(file_name(p), sha256_file(p)?);
    }
    Ok(map)
}

/// Write a stage manifest. `config` pairs are stored as a sorted map;
/// inputs and outputs as name -> sha256 of the file as it exists now.
pub fn write_manifest(
    stage: &str,
    config: &[(String, String)],
    inputs: &[&Path],
    outputs: &[&Path],
    path: &Path,
) -> Result<()> {
    let config_map: BTreeMap<&str, &str> = config
        .iter()
        .map(|(k, v)| (k.as_str(), v.as_str()))
        .collect();
    let doc = json!({
        "format": "adsb-manifest v1",
        "stage": stage,
        "config": config_map,
        "inputs": hash_map(inputs)?,
        "outputs": hash_map(outputs)?,
    });
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| PipelineError::data(format!("manifest serialization: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

/// Default manifest location for a stage whose primary output is `out`.
pub fn manifest_path_for(out: &Path, stage: &str) -> std::path::PathBuf {
    let dir = out.parent().unwrap_or_else(|| Path::new("."));
    dir.join(format!("{stage}.manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_hash_and_deterministic_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("a.txt");
        std::fs::write(&f, "abc").unwrap();
        // sha256("abc"), a fixed reference value.
        assert_eq!(
            sha256_file(&f).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );

        let m1 = dir.path().join("m1.json");
        let m2 = dir.path().join("m2.json");
        let cfg = vec![("seed".to_string(), "42".to_string())];
        write_manifest("ingest", &cfg, &[&f], &[&f], &m1).unwrap();
        write_manifest("ingest", &cfg, &[&f], &[&f], &m2).unwrap();
        assert_eq!(
            std::fs::read(&m1).unwrap(),
            std::fs::read(&m2).unwrap()
        );
        let text = std::fs::read_to_string(&m1).unwrap();
        assert!(text.contains("\"stage\": \"ingest\""));
        assert!(!text.contains(dir.path().to_str().unwrap()), "no absolute paths");
    }

    #[test]
    fn missing_artifact_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_manifest(
            "train",
            &[],
            &[],
            &[&dir.path().join("missing.params")],
            &dir.path().join("m.json"),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
