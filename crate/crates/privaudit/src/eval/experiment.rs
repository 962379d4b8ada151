//! Grid orchestration: derived seeds, shared shadow profiles, and CSV
//! emission for plotting elsewhere.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attack::{shadow_profile, FPProfile};
use crate::data::Dataset;
use crate::gen::GeneratorKind;
use crate::rng::{child_seed, child_seed_idx};
use crate::{Error, Result};

use super::trial::{run_trial_with_profile, AttackKind, TrialConfig};

/// One row per trial per attack. Metric fields are deterministic in the
/// master seed; the runtime fields are wall-clock and live in a separate
/// CSV so the results table stays bit-reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRow {
    pub cell: usize,
    pub trial: usize,
    pub generator: GeneratorKind,
    pub epsilon: f64,
    pub train_size: usize,
    pub synth_size: usize,
    pub n_targets: usize,
    pub n_members: usize,
    pub set_size: Option<usize>,
    pub attack: AttackKind,
    pub auc: f64,
    pub ma: f64,
    pub set_auc: Option<f64>,
    pub set_ma: Option<f64>,
    pub quality: f64,
    pub fit_secs: f64,
    pub shadow_secs: f64,
    pub zeta_secs: f64,
    pub total_secs: f64,
}

/// Mean and sample standard deviation per (cell, attack).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: usize,
    pub generator: GeneratorKind,
    pub epsilon: f64,
    pub train_size: usize,
    pub synth_size: usize,
    pub n_targets: usize,
    pub n_members: usize,
    pub set_size: Option<usize>,
    pub attack: AttackKind,
    pub trials: usize,
    pub auc_mean: f64,
    pub auc_std: f64,
    pub ma_mean: f64,
    pub ma_std: f64,
    pub set_auc_mean: Option<f64>,
    pub set_auc_std: Option<f64>,
    pub set_ma_mean: Option<f64>,
    pub set_ma_std: Option<f64>,
    pub quality_mean: f64,
    pub quality_std: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

/// Shadow profiles are shared across every trial that queries the same
/// generator behavior, keyed by kind, exact epsilon bits, training size,
/// and run count.
pub type ProfileKey = (GeneratorKind, u64, usize, usize);

pub fn profile_key(cfg: &TrialConfig) -> ProfileKey {
    (
        cfg.generator.kind,
        cfg.generator.epsilon.to_bits(),
        cfg.train_size,
        cfg.shadow_runs,
    )
}

/// Deterministic seed for a cached profile. Depends only on the master
/// seed and the profile key, never on grid position, so reordering cells
/// cannot change any profile.
pub fn profile_seed(master: u64, key: ProfileKey) -> u64 {
    let (kind, eps_bits, train_size, runs) = key;
    child_seed(master, &format!("profile/{kind}/{eps_bits:016x}/{train_size}/{runs}"))
}

/// Deterministic seed for one trial of one grid cell.
pub fn trial_seed(master: u64, cell: usize, trial: usize) -> u64 {
    child_seed_idx(
        child_seed_idx(master, "experiment/cell", cell as u64),
        "experiment/trial",
        trial as u64,
    )
}

/// Build every profile the grid needs, once each, against the full
/// auxiliary data. Profiles describe the generator's selection behavior,
/// not any particular trial's training split, so one per key serves all
/// trials of all matching cells.
pub fn build_profile_cache(
    grid: &[TrialConfig],
    aux: &Dataset,
    master: u64,
) -> Result<HashMap<ProfileKey, FPProfile>> {
    let mut cache = HashMap::new();
    for cfg in grid {
        if !cfg.attacks.iter().any(|a| a.uses_profile()) {
            continue;
        }
        let key = profile_key(cfg);
        if cache.contains_key(&key) {
            continue;
        }
        let profile = shadow_profile(
            &cfg.generator,
            aux,
            cfg.train_size,
            cfg.shadow_runs,
            profile_seed(master, key),
        )?;
        cache.insert(key, profile);
    }
    Ok(cache)
}

fn with_trial_context(e: Error, cell: usize, trial: usize) -> Error {
    let msg = format!("cell {cell} trial {trial}: {e}");
    match e {
        Error::Config(_) => Error::Config(msg),
        Error::Data(_) => Error::Data(msg),
        Error::Runtime(_) => Error::Runtime(msg),
    }
}

/// Run `trials` independent trials for every grid cell. Each trial's seed
/// derives from (master, cell, trial) alone and trials execute in
/// parallel, so results are identical at any thread count. Rows come back
/// ordered by cell, then trial, then the cell's attack order.
pub fn run_experiment(
    grid: &[TrialConfig],
    trials: usize,
    master: u64,
    aux: &Dataset,
) -> Result<ExperimentOutcome> {
    let cache = build_profile_cache(grid, aux, master)?;
    run_experiment_with_profiles(grid, trials, master, aux, &cache)
}

/// [`run_experiment`] against an existing profile cache, for callers that
/// also want the profiles themselves (they are deterministic in the master
/// seed and key, so prebuilding changes nothing).
pub fn run_experiment_with_profiles(
    grid: &[TrialConfig],
    trials: usize,
    master: u64,
    aux: &Dataset,
    cache: &HashMap<ProfileKey, FPProfile>,
) -> Result<ExperimentOutcome> {
    if grid.is_empty() {
        return Err(Error::Config("experiment grid is empty".into()));
    }
    if trials == 0 {
        return Err(Error::Config("need at least one trial per cell".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();
    let per_job: Vec<Result<Vec<ResultRow>>> = jobs
        .par_iter()
        .map(|&(cell, trial)| {
            let mut cfg = grid[cell].clone();
            cfg.seed = trial_seed(master, cell, trial);
            let profile = cache.get(&profile_key(&cfg));
            let res = run_trial_with_profile(&cfg, aux, profile)
                .map_err(|e| with_trial_context(e, cell, trial))?;
            Ok(res
                .reports
                .into_iter()
                .map(|rep| ResultRow {
                    cell,
                    trial,
                    generator: cfg.generator.kind,
                    epsilon: cfg.generator.epsilon,
                    train_size: cfg.train_size,
                    synth_size: cfg.generator.synth_rows,
                    n_targets: cfg.n_targets,
                    n_members: cfg.n_members,
                    set_size: cfg.set_size,
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
                .collect())
        })
        .collect();
    let mut rows = Vec::with_capacity(jobs.len());
    for job in per_job {
        rows.extend(job?);
    }
    let summary = summarize(&rows);
    Ok(ExperimentOutcome { rows, summary })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn optional_mean_std(values: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let present: Vec<f64> = values.iter().filter_map(|v| *v).collect();
    if present.len() != values.len() {
        return (None, None);
    }
    let (m, s) = mean_std(&present);
    (Some(m), Some(s))
}

/// Aggregate per-trial rows into one row per (cell, attack), in first
/// appearance order. Means are plain arithmetic means; std is the sample
/// standard deviation (zero for a single trial).
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut order: Vec<(usize, AttackKind)> = Vec::new();
    let mut groups: HashMap<(usize, AttackKind), Vec<&ResultRow>> = HashMap::new();
    for row in rows {
        let key = (row.cell, row.attack);
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).unwrap().push(row);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let first = members[0];
            let (auc_mean, auc_std) = mean_std(&members.iter().map(|r| r.auc).collect::<Vec<_>>());
            let (ma_mean, ma_std) = mean_std(&members.iter().map(|r| r.ma).collect::<Vec<_>>());
            let (quality_mean, quality_std) =
                mean_std(&members.iter().map(|r| r.quality).collect::<Vec<_>>());
            let (set_auc_mean, set_auc_std) =
                optional_mean_std(&members.iter().map(|r| r.set_auc).collect::<Vec<_>>());
            let (set_ma_mean, set_ma_std) =
                optional_mean_std(&members.iter().map(|r| r.set_ma).collect::<Vec<_>>());
            SummaryRow {
                cell: first.cell,
                generator: first.generator,
                epsilon: first.epsilon,
                train_size: first.train_size,
                synth_size: first.synth_size,
                n_targets: first.n_targets,
                n_members: first.n_members,
                set_size: first.set_size,
                attack: first.attack,
                trials: members.len(),
                auc_mean,
                auc_std,
                ma_mean,
                ma_std,
                set_auc_mean,
                set_auc_std,
                set_ma_mean,
                set_ma_std,
                quality_mean,
                quality_std,
            }
        })
        .collect()
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Metric table, one row per trial per attack. Deterministic in the master
/// seed: no wall-clock columns (those are in [`timings_csv`]).
pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(
        "cell,trial,generator,epsilon,train_size,synth_size,targets,members,set_size,attack,auc,ma,set_auc,set_ma,quality\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.cell,
            r.trial,
            r.generator,
            r.epsilon,
            r.train_size,
            r.synth_size,
            r.n_targets,
            r.n_members,
            opt_usize(r.set_size),
            r.attack,
            r.auc,
            r.ma,
            opt_f64(r.set_auc),
            opt_f64(r.set_ma),
            r.quality,
        ));
    }
    out
}

/// Wall-clock companion to [`results_csv`]; varies run to run.
pub fn timings_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("cell,trial,generator,epsilon,attack,fit_secs,shadow_secs,zeta_secs,total_secs\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.cell, r.trial, r.generator, r.epsilon, r.attack, r.fit_secs, r.shadow_secs, r.zeta_secs, r.total_secs,
        ));
    }
    out
}

/// Aggregated table, one row per (cell, attack).
pub fn summary_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from(
        "cell,generator,epsilon,train_size,synth_size,targets,members,set_size,attack,trials,auc_mean,auc_std,ma_mean,ma_std,set_auc_mean,set_auc_std,set_ma_mean,set_ma_std,quality_mean,quality_std\n",
    );
    for s in summary {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.cell,
            s.generator,
            s.epsilon,
            s.train_size,
            s.synth_size,
            s.n_targets,
            s.n_members,
            opt_usize(s.set_size),
            s.attack,
            s.trials,
            s.auc_mean,
            s.auc_std,
            s.ma_mean,
            s.ma_std,
            opt_f64(s.set_auc_mean),
            opt_f64(s.set_auc_std),
            opt_f64(s.set_ma_mean),
            opt_f64(s.set_ma_std),
            s.quality_mean,
            s.quality_std,
        ));
    }
    out
}
