//! Command implementations behind the `privaudit` binary.
//!
//! Each command reads one JSON config, writes its artifacts into an output
//! directory, and records a [`RunManifest`] with fingerprints of every input
//! so reruns can be verified (and, for experiments, resumed).

mod commands;
mod manifest;

pub use commands::{
    cmd_attack, cmd_experiment, cmd_generate, cmd_profile, cmd_quality, AttackConfig, DataSource,
    ExperimentConfig, GenerateConfig, ProfileConfig, QualityConfig, ScoredAttack,
    CONFIG_SCHEMA_VERSION,
};
pub use manifest::{sha256_hex, FileFingerprint, RunManifest, MANIFEST_VERSION};
