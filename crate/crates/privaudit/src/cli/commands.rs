//! The five batch operations behind the command line. Each takes a JSON
//! config, writes its artifacts plus a manifest into an output directory,
//! and is deterministic in the resolved seed.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{activate, domias_score, random_profile, shadow_profile, zeta, zeta_log, FPProfile, TargetScore};
use crate::data::{
    load_csv, load_csv_raw, load_schema, save_csv, save_schema, synthesize_population, Dataset,
    PopulationConfig, Schema,
};
use crate::eval::{
    auc, membership_advantage, profile_key, profile_seed, results_csv, roc,
    run_trial_with_profile, summarize, summary_csv, timings_csv, trial_seed, AttackKind,
    ProfileKey, ResultRow, TrialConfig,
};
use crate::gen::{fit, sample, GeneratorConfig, Mode};
use crate::rng::{child_seed, stream};
use crate::stats::dataset_distance;
use crate::{Error, Result};

use super::manifest::RunManifest;

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

fn check_version(v: u32) -> Result<()> {
    if v != CONFIG_SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "config schema_version {v} unsupported (expected {CONFIG_SCHEMA_VERSION})"
        )));
    }
    Ok(())
}

fn default_bins() -> usize {
    20
}

fn default_runs() -> usize {
    50
}

fn default_sharpness() -> f64 {
    1.0
}

fn default_log_threshold() -> u32 {
    40
}

/// Where a command gets its tabular data: a CSV on disk (numeric columns
/// discretized equal-depth) or a seeded synthetic population.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    Csv {
        path: String,
        #[serde(default = "default_bins")]
        bins: usize,
        /// Schema sidecar; when given, values are decoded against it
        /// instead of inferring types.
        #[serde(default)]
        schema: Option<String>,
    },
    Population(PopulationConfig),
}

impl DataSource {
    /// Load the data, resolving relative paths against `base` (the config
    /// file's directory). Returns the schema, the dataset, and the files
    /// read (for fingerprinting).
    pub fn load(&self, base: &Path) -> Result<(Arc<Schema>, Dataset, Vec<PathBuf>)> {
        match self {
            DataSource::Csv { path, bins, schema } => {
                let csv_path = base.join(path);
                let mut inputs = vec![csv_path.clone()];
                let (schema, ds) = match schema {
                    Some(sp) => {
                        let schema_path = base.join(sp);
                        inputs.push(schema_path.clone());
                        let schema = load_schema(&schema_path)?;
                        let ds = load_csv(&csv_path, &schema)?;
                        (schema, ds)
                    }
                    None => load_csv_raw(&csv_path, None)?.discretize(*bins)?,
                };
                Ok((schema, ds, inputs))
            }
            DataSource::Population(cfg) => {
                let ds = synthesize_population(cfg)?;
                Ok((Arc::clone(ds.schema()), ds, Vec::new()))
            }
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, serde_json::Value)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg: T = serde_json::from_value(value.clone())
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((cfg, value))
}

fn config_base(config_path: &Path) -> PathBuf {
    config_path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Runtime(format!("cannot create {}: {e}", dir.display())))
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| Error::Runtime(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| Error::Runtime(format!("cannot move {} into place: {e}", path.display())))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerateConfig {
    pub schema_version: u32,
    /// Training data.
    pub data: DataSource,
    pub generator: GeneratorConfig,
    /// Stop after focal-point selection; no synthetic CSV.
    #[serde(default)]
    pub fp_only: bool,
}

/// Fit a generator and write the synthetic CSV, the fitted model, the
/// budget ledger, and a manifest. With `fp_only` only the selection
/// summary is written.
pub fn cmd_generate(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunManifest> {
    let (mut cfg, _) = read_config::<GenerateConfig>(config_path)?;
    check_version(cfg.schema_version)?;
    if let Some(s) = seed {
        cfg.generator.seed = s;
    }
    let base = config_base(config_path);
    let (schema, train, data_inputs) = cfg.data.load(&base)?;
    ensure_dir(out_dir)?;

    let mut manifest = RunManifest::new("generate", cfg.generator.seed, serde_json::to_value(&cfg)?);
    manifest.add_input(config_path)?;
    for p in &data_inputs {
        manifest.add_input(p)?;
    }

    let mode = if cfg.fp_only { Mode::FpOnly } else { Mode::Full };
    let outcome = fit(&cfg.generator, &train, mode)?;

    let fit_path = out_dir.join("fit.json");
    write_atomic(&fit_path, &outcome.to_json()?)?;
    manifest.add_output(&fit_path);

    if !cfg.fp_only {
        let synth = sample(
            &outcome,
            cfg.generator.synth_rows,
            &mut stream(cfg.generator.seed, "generate/sample"),
        )?;
        let synth_path = out_dir.join("synth.csv");
        save_csv(&synth, &synth_path)?;
        manifest.add_output(&synth_path);

        let schema_path = out_dir.join("schema.json");
        save_schema(&schema, &schema_path)?;
        manifest.add_output(&schema_path);

        let model_path = out_dir.join("model.json");
        write_atomic(&model_path, &serde_json::to_string_pretty(&outcome.model)?)?;
        manifest.add_output(&model_path);
    }

    let manifest_path = out_dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(manifest)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub schema_version: u32,
    /// Auxiliary data the shadow runs sample from.
    pub data: DataSource,
    pub generator: GeneratorConfig,
    /// Rows per shadow training sample.
    pub train_size: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
}

/// Build a shadow focal-point profile and write it as JSON.
pub fn cmd_profile(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunManifest> {
    let (mut cfg, _) = read_config::<ProfileConfig>(config_path)?;
    check_version(cfg.schema_version)?;
    if let Some(s) = seed {
        cfg.generator.seed = s;
    }
    let base = config_base(config_path);
    let (_, aux, data_inputs) = cfg.data.load(&base)?;
    ensure_dir(out_dir)?;

    let mut manifest = RunManifest::new("profile", cfg.generator.seed, serde_json::to_value(&cfg)?);
    manifest.add_input(config_path)?;
    for p in &data_inputs {
        manifest.add_input(p)?;
    }

    let profile = shadow_profile(&cfg.generator, &aux, cfg.train_size, cfg.runs, cfg.generator.seed)?;
    let profile_path = out_dir.join("profile.json");
    write_atomic(&profile_path, &profile.to_json()?)?;
    manifest.add_output(&profile_path);

    let manifest_path = out_dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(manifest)
}

fn default_attack_list() -> Vec<AttackKind> {
    vec![AttackKind::MamaMia]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttackConfig {
    pub schema_version: u32,
    /// Synthetic dataset under audit.
    pub synth: String,
    /// Auxiliary (population) data.
    pub aux: String,
    /// Target records to score.
    pub targets: String,
    /// Optional ground truth: one 0/1 per target row (optional `label`
    /// header). With labels the report includes AUC, MA, and ROC.
    #[serde(default)]
    pub labels: Option<String>,
    /// Schema sidecar; when absent the schema is inferred from `aux` and
    /// numeric columns are binned.
    #[serde(default)]
    pub schema: Option<String>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// The black-box declaration: which generator made `synth`, at which
    /// epsilon. Required for shadow modelling.
    #[serde(default)]
    pub generator: Option<GeneratorConfig>,
    #[serde(default = "default_attack_list")]
    pub attacks: Vec<AttackKind>,
    /// Path to a cached profile JSON; skips shadow runs.
    #[serde(default)]
    pub profile: Option<String>,
    /// Shadow training size; defaults to the synthetic row count.
    #[serde(default)]
    pub train_size: Option<usize>,
    #[serde(default = "default_runs")]
    pub shadow_runs: usize,
    #[serde(default = "default_sharpness")]
    pub sharpness: f64,
    /// Assumed fraction of targets that are members; calibrates the
    /// activation midpoint. Defaults to one half.
    #[serde(default)]
    pub member_fraction: Option<f64>,
    #[serde(default = "default_log_threshold")]
    pub log_threshold: u32,
}

/// One attack's scored targets; metric fields appear only when ground
/// truth labels were supplied.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoredAttack {
    pub attack: AttackKind,
    pub auc: Option<f64>,
    pub ma: Option<f64>,
    pub roc: Option<Vec<(f64, f64)>>,
    pub scores: Vec<TargetScore>,
}

fn read_labels(path: &Path, expected: usize) -> Result<Vec<bool>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || (i == 0 && t.eq_ignore_ascii_case("label")) {
            continue;
        }
        match t {
            "0" | "false" => labels.push(false),
            "1" | "true" => labels.push(true),
            other => {
                return Err(Error::Data(format!(
                    "{} line {}: label {other:?} is not 0/1",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if labels.len() != expected {
        return Err(Error::Data(format!(
            "{} labels for {expected} targets",
            labels.len()
        )));
    }
    Ok(labels)
}

/// Score targets against a synthetic dataset. All configured attacks run
/// over the same inputs; outputs are a JSON report and a per-target CSV.
pub fn cmd_attack(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunManifest> {
    let (cfg, _) = read_config::<AttackConfig>(config_path)?;
    check_version(cfg.schema_version)?;
    let Some(mut generator) = cfg.generator.clone() else {
        return Err(Error::Config(
            "threat model incomplete: declare the generator (kind and epsilon) that produced the \
             synthetic data; shadow modelling cannot run without it"
                .into(),
        ));
    };
    if let Some(s) = seed {
        generator.seed = s;
    }
    if cfg.attacks.is_empty() {
        return Err(Error::Config("configure at least one attack".into()));
    }
    let base = config_base(config_path);
    let aux_path = base.join(&cfg.aux);
    let synth_path = base.join(&cfg.synth);
    let targets_path = base.join(&cfg.targets);

    // The auxiliary data defines the schema; synth and targets are decoded
    // against it so category codes agree across all three.
    let (schema, aux) = match &cfg.schema {
        Some(sp) => {
            let schema = load_schema(&base.join(sp))?;
            let aux = load_csv(&aux_path, &schema)?;
            (schema, aux)
        }
        None => load_csv_raw(&aux_path, None)?.discretize(cfg.bins)?,
    };
    let synth = load_csv(&synth_path, &schema)?;
    let targets = load_csv(&targets_path, &schema)?;
    if targets.n_rows() == 0 {
        return Err(Error::Data("no target rows to score".into()));
    }
    let labels = match &cfg.labels {
        Some(lp) => Some(read_labels(&base.join(lp), targets.n_rows())?),
        None => None,
    };

    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("attack", generator.seed, serde_json::to_value(&cfg)?);
    manifest.add_input(config_path)?;
    for p in [&aux_path, &synth_path, &targets_path] {
        manifest.add_input(p)?;
    }
    if let Some(sp) = &cfg.schema {
        manifest.add_input(&base.join(sp))?;
    }
    if let Some(lp) = &cfg.labels {
        manifest.add_input(&base.join(lp))?;
    }

    let train_size = cfg.train_size.unwrap_or(synth.n_rows());
    let needs_profile = cfg.attacks.iter().any(|a| a.uses_profile());
    let profile: Option<FPProfile> = if !needs_profile {
        None
    } else if let Some(pp) = &cfg.profile {
        let profile_path = base.join(pp);
        manifest.add_input(&profile_path)?;
        let text = std::fs::read_to_string(&profile_path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", profile_path.display())))?;
        let p = FPProfile::from_json(&text)?;
        if p.kind != generator.kind || p.epsilon.to_bits() != generator.epsilon.to_bits() {
            return Err(Error::Config(format!(
                "cached profile ({}, eps {}) does not match the declared generator ({}, eps {})",
                p.kind, p.epsilon, generator.kind, generator.epsilon
            )));
        }
        Some(p)
    } else {
        Some(shadow_profile(&generator, &aux, train_size, cfg.shadow_runs, generator.seed)?)
    };

    let mf = cfg.member_fraction.unwrap_or(0.5);
    let mut results = Vec::with_capacity(cfg.attacks.len());
    for &attack in &cfg.attacks {
        let mut scores = match attack {
            AttackKind::MamaMia => zeta(&synth, &aux, profile.as_ref().unwrap(), &targets)?,
            AttackKind::MamaMiaLog => zeta_log(
                &synth,
                &aux,
                profile.as_ref().unwrap(),
                cfg.log_threshold,
                &targets,
            )?,
            AttackKind::Domias => domias_score(&synth, &aux, &targets)?,
            AttackKind::RandomFp => {
                let arbitrary = random_profile(
                    profile.as_ref().unwrap(),
                    &schema,
                    child_seed(generator.seed, "attack/random-fp"),
                )?;
                zeta(&synth, &aux, &arbitrary, &targets)?
            }
        };
        activate(&mut scores, cfg.sharpness, mf)?;
        let (auc_v, ma_v, roc_v) = match &labels {
            None => (None, None, None),
            Some(l) => {
                for (s, &lab) in scores.iter_mut().zip(l) {
                    s.label = Some(lab);
                }
                let probs: Vec<f64> = scores.iter().map(|s| s.probability.unwrap()).collect();
                (
                    Some(auc(&probs, l)?),
                    Some(membership_advantage(&probs, l)?),
                    Some(roc(&probs, l)?),
                )
            }
        };
        results.push(ScoredAttack { attack, auc: auc_v, ma: ma_v, roc: roc_v, scores });
    }

    let report_path = out_dir.join("report.json");
    write_atomic(&report_path, &serde_json::to_string_pretty(&results)?)?;
    manifest.add_output(&report_path);

    let mut csv = String::from("attack,target,zeta,probability,label\n");
    for r in &results {
        for s in &r.scores {
            let label = s.label.map(|l| (l as u8).to_string()).unwrap_or_default();
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r.attack,
                s.target,
                s.zeta,
                s.probability.unwrap(),
                label
            ));
        }
    }
    let scores_path = out_dir.join("scores.csv");
    write_atomic(&scores_path, &csv)?;
    manifest.add_output(&scores_path);

    let manifest_path = out_dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(manifest)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    /// Auxiliary data shared by every cell.
    pub data: DataSource,
    /// Grid cells; per-cell seeds are derived from the master seed and the
    /// cell's position, so the `seed` fields inside are ignored.
    pub grid: Vec<TrialConfig>,
    pub trials: usize,
    pub master_seed: u64,
}

fn profile_file(dir: &Path, key: ProfileKey) -> PathBuf {
    let (kind, eps_bits, train_size, runs) = key;
    dir.join(format!("{kind}-{eps_bits:016x}-{train_size}-{runs}.json"))
}

fn row_file(dir: &Path, cell: usize, trial: usize) -> PathBuf {
    dir.join(format!("cell{cell}-trial{trial}.json"))
}

/// Drive a full experiment grid. Resumable: each finished trial persists
/// as a JSON row file keyed by (cell, trial), and a re-run against the
/// same manifest only executes the missing ones. Results are identical at
/// any parallelism because every seed derives from (master, cell, trial).
pub fn cmd_experiment(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<RunManifest> {
    let (mut cfg, _) = read_config::<ExperimentConfig>(config_path)?;
    check_version(cfg.schema_version)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if cfg.grid.is_empty() {
        return Err(Error::Config("experiment grid is empty".into()));
    }
    if cfg.trials == 0 {
        return Err(Error::Config("need at least one trial per cell".into()));
    }
    let base = config_base(config_path);
    let (_, aux, data_inputs) = cfg.data.load(&base)?;
    ensure_dir(out_dir)?;

    let mut manifest = RunManifest::new("experiment", cfg.master_seed, serde_json::to_value(&cfg)?);
    manifest.add_input(config_path)?;
    for p in &data_inputs {
        manifest.add_input(p)?;
    }

    // Refuse to mix two different runs in one directory; resume otherwise.
    let manifest_path = out_dir.join("manifest.json");
    if manifest_path.exists() {
        let previous = RunManifest::load(&manifest_path)?;
        if !previous.same_run(&manifest) {
            return Err(Error::Config(format!(
                "{} belongs to a different run (command/config/seed/inputs differ); \
                 use a fresh output directory",
                manifest_path.display()
            )));
        }
    }

    let profiles_dir = out_dir.join("profiles");
    let rows_dir = out_dir.join("rows");
    ensure_dir(&profiles_dir)?;
    ensure_dir(&rows_dir)?;

    // Shared shadow profiles, persisted so resumed runs skip the shadow
    // stage entirely.
    let mut keys: Vec<(ProfileKey, usize)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (c, cell) in cfg.grid.iter().enumerate() {
        if cell.attacks.iter().any(|a| a.uses_profile()) {
            let key = profile_key(cell);
            if seen.insert(key) {
                keys.push((key, c));
            }
        }
    }
    let mut cache = std::collections::HashMap::new();
    for (key, c) in keys {
        let path = profile_file(&profiles_dir, key);
        let profile = if path.exists() {
            FPProfile::from_json(&std::fs::read_to_string(&path).map_err(|e| {
                Error::Data(format!("cannot read {}: {e}", path.display()))
            })?)?
        } else {
            let p = shadow_profile(
                &cfg.grid[c].generator,
                &aux,
                cfg.grid[c].train_size,
                cfg.grid[c].shadow_runs,
                profile_seed(cfg.master_seed, key),
            )?;
            write_atomic(&path, &p.to_json()?)?;
            p
        };
        cache.insert(key, profile);
    }

    let jobs: Vec<(usize, usize)> = (0..cfg.grid.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let pending: Vec<(usize, usize)> = jobs
        .iter()
        .copied()
        .filter(|&(c, t)| !row_file(&rows_dir, c, t).exists())
        .collect();

    let attempts: Vec<((usize, usize), Result<()>)> = pending
        .par_iter()
        .map(|&(cell, trial)| {
            let run = || -> Result<()> {
                let mut trial_cfg = cfg.grid[cell].clone();
                trial_cfg.seed = trial_seed(cfg.master_seed, cell, trial);
                let profile = cache.get(&profile_key(&trial_cfg));
                let res = run_trial_with_profile(&trial_cfg, &aux, profile)?;
                let rows: Vec<ResultRow> = res
                    .reports
                    .iter()
                    .map(|rep| ResultRow {
                        cell,
                        trial,
                        generator: trial_cfg.generator.kind,
                        epsilon: trial_cfg.generator.epsilon,
                        train_size: trial_cfg.train_size,
                        synth_size: trial_cfg.generator.synth_rows,
                        n_targets: trial_cfg.n_targets,
                        n_members: trial_cfg.n_members,
                        set_size: trial_cfg.set_size,
                        attack: rep.attack,
                        auc: rep.auc,
                        ma: rep.ma,
                        set_auc: rep.set_auc,
                        set_ma: rep.set_ma,
                        quality: res.quality,
                        fit_secs: res.fit_secs,
                        shadow_secs: rep.runtimes.shadow_secs,
                        zeta_secs: rep.runtimes.zeta_secs,
                        total_secs: rep.runtimes.total_secs,
                    })
                    .collect();
                write_atomic(&row_file(&rows_dir, cell, trial), &serde_json::to_string(&rows)?)
            };
            ((cell, trial), run())
        })
        .collect();

    let failures: Vec<String> = attempts
        .iter()
        .filter_map(|((c, t), r)| r.as_ref().err().map(|e| format!("cell {c} trial {t}: {e}")))
        .collect();
    if !failures.is_empty() {
        return Err(Error::Runtime(format!(
            "{} of {} trials failed ({} completed earlier or this run remain resumable): {}",
            failures.len(),
            jobs.len(),
            jobs.len() - pending.len() + (pending.len() - failures.len()),
            failures.join("; ")
        )));
    }

    let mut rows: Vec<ResultRow> = Vec::new();
    for (cell, trial) in jobs {
        let path = row_file(&rows_dir, cell, trial);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
        let trial_rows: Vec<ResultRow> =
            serde_json::from_str(&text).map_err(|e| Error::Data(format!("bad row file {}: {e}", path.display())))?;
        rows.extend(trial_rows);
    }
    let summary = summarize(&rows);

    let results_path = out_dir.join("results.csv");
    write_atomic(&results_path, &results_csv(&rows))?;
    manifest.add_output(&results_path);
    let timings_path = out_dir.join("timings.csv");
    write_atomic(&timings_path, &timings_csv(&rows))?;
    manifest.add_output(&timings_path);
    let summary_path = out_dir.join("summary.csv");
    write_atomic(&summary_path, &summary_csv(&summary))?;
    manifest.add_output(&summary_path);

    manifest.save(&manifest_path)?;
    Ok(manifest)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QualityConfig {
    pub schema_version: u32,
    /// Synthetic (or candidate) CSV.
    pub synth: String,
    /// Reference CSV, e.g. the training data.
    pub reference: String,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default)]
    pub schema: Option<String>,
}

/// Per-column transport distance between two CSVs sharing a schema. The
/// reference file defines the schema when no sidecar is given.
pub fn cmd_quality(config_path: &Path, out_dir: &Path) -> Result<(RunManifest, f64)> {
    let (cfg, _) = read_config::<QualityConfig>(config_path)?;
    check_version(cfg.schema_version)?;
    let base = config_base(config_path);
    let synth_path = base.join(&cfg.synth);
    let reference_path = base.join(&cfg.reference);
    let (schema, reference) = match &cfg.schema {
        Some(sp) => {
            let schema = load_schema(&base.join(sp))?;
            let ds = load_csv(&reference_path, &schema)?;
            (schema, ds)
        }
        None => load_csv_raw(&reference_path, None)?.discretize(cfg.bins)?,
    };
    let synth = load_csv(&synth_path, &schema)?;
    let distance = dataset_distance(&synth, &reference)?;

    ensure_dir(out_dir)?;
    let mut manifest = RunManifest::new("quality", 0, serde_json::to_value(&cfg)?);
    manifest.add_input(config_path)?;
    manifest.add_input(&synth_path)?;
    manifest.add_input(&reference_path)?;
    if let Some(sp) = &cfg.schema {
        manifest.add_input(&base.join(sp))?;
    }
    let quality_path = out_dir.join("quality.json");
    write_atomic(
        &quality_path,
        &serde_json::to_string_pretty(&serde_json::json!({ "distance": distance }))?,
    )?;
    manifest.add_output(&quality_path);
    let manifest_path = out_dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok((manifest, distance))
}
