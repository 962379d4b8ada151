//! Run manifests: enough provenance to reproduce any output bit-exactly
//! and to refuse resuming over a different run's directory.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileFingerprint {
    pub path: String,
    pub sha256: String,
}

/// Written alongside every command's outputs. Two runs with equal
/// manifests (same command, config, seed, and input hashes) produce
/// byte-identical deterministic outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub toolkit_version: String,
    pub master_seed: u64,
    /// The fully resolved config, after flag overrides.
    pub config: serde_json::Value,
    pub inputs: Vec<FileFingerprint>,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

impl RunManifest {
    pub fn new(command: &str, master_seed: u64, config: serde_json::Value) -> Self {
        RunManifest {
            schema_version: MANIFEST_VERSION,
            command: command.to_string(),
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(FileFingerprint {
            path: path.display().to_string(),
            sha256: sha256_hex(path)?,
        });
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    /// Re-hash every recorded input and fail on any drift.
    pub fn verify_inputs(&self) -> Result<()> {
        for fp in &self.inputs {
            let now = sha256_hex(Path::new(&fp.path))?;
            if now != fp.sha256 {
                return Err(Error::Data(format!(
                    "input {} changed since the manifest was written",
                    fp.path
                )));
            }
        }
        Ok(())
    }

    /// True when `other` describes the same run: command, seed, resolved
    /// config, and input fingerprints all agree. Outputs are not compared;
    /// they may not exist yet on a resumed run.
    pub fn same_run(&self, other: &RunManifest) -> bool {
        self.schema_version == other.schema_version
            && self.command == other.command
            && self.master_seed == other.master_seed
            && self.config == other.config
            && self.inputs == other.inputs
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)
            .map_err(|e| Error::Runtime(format!("cannot write {}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| Error::Data(format!("bad manifest: {e}")))?;
        if m.schema_version != MANIFEST_VERSION {
            return Err(Error::Config(format!(
                "manifest version {} unsupported (expected {MANIFEST_VERSION})",
                m.schema_version
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fingerprints_are_stable_and_content_sensitive() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("in.txt");
        std::fs::write(&p, "abc").unwrap();
        let a = sha256_hex(&p).unwrap();
        assert_eq!(a, sha256_hex(&p).unwrap());
        assert_eq!(a.len(), 64);
        std::fs::write(&p, "abd").unwrap();
        assert_ne!(a, sha256_hex(&p).unwrap());
    }

    #[test]
    fn round_trip_and_drift_detection() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("data.csv");
        std::fs::write(&input, "a\n1\n").unwrap();

        let mut m = RunManifest::new("generate", 7, serde_json::json!({"x": 1}));
        m.add_input(&input).unwrap();
        m.add_output(&dir.path().join("synth.csv"));
        let mp = dir.path().join("manifest.json");
        m.save(&mp).unwrap();

        let back = RunManifest::load(&mp).unwrap();
        assert!(m.same_run(&back));
        back.verify_inputs().unwrap();

        std::fs::write(&input, "a\n2\n").unwrap();
        assert!(back.verify_inputs().is_err());

        let mut other = RunManifest::new("generate", 8, serde_json::json!({"x": 1}));
        other.add_input(&input).unwrap();
        assert!(!m.same_run(&other), "different seed is a different run");
    }
}
