//! One end-to-end audit trial: sample a training set, fit the generator,
//! and run every configured attack against the same synthetic output.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::attack::{
    activate, domias_score, random_profile, set_mi, shadow_profile, zeta, zeta_log, FPProfile,
    TargetScore,
};
use crate::data::Dataset;
use crate::gen::{fit, sample, GeneratorConfig, Mode};
use crate::rng::{child_seed, stream};
use crate::stats::dataset_distance;
use crate::{Error, Result};

use super::metrics::{auc, membership_advantage, roc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    /// Shadow-profile weighted density ratio.
    MamaMia,
    /// Log-aggregated variant over frequently selected focal points.
    MamaMiaLog,
    /// Generator-agnostic 1-way density ratio baseline.
    Domias,
    /// Ablation: the shadow profile's weights on arbitrary focal points.
    RandomFp,
}

impl AttackKind {
    pub fn uses_profile(self) -> bool {
        !matches!(self, AttackKind::Domias)
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AttackKind::MamaMia => "mama-mia",
            AttackKind::MamaMiaLog => "mama-mia-log",
            AttackKind::Domias => "domias",
            AttackKind::RandomFp => "random-fp",
        };
        f.write_str(s)
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mama-mia" => Ok(AttackKind::MamaMia),
            "mama-mia-log" => Ok(AttackKind::MamaMiaLog),
            "domias" => Ok(AttackKind::Domias),
            "random-fp" => Ok(AttackKind::RandomFp),
            other => Err(Error::Config(format!(
                "unknown attack {other:?}; expected mama-mia, mama-mia-log, domias, or random-fp"
            ))),
        }
    }
}

fn default_attacks() -> Vec<AttackKind> {
    vec![AttackKind::MamaMia, AttackKind::Domias]
}

fn default_shadow_runs() -> usize {
    50
}

fn default_sharpness() -> f64 {
    1.0
}

fn default_log_threshold() -> u32 {
    40
}

/// Full description of one trial. `n_targets` and `n_members` count sets
/// when `set_size` is given, otherwise single records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialConfig {
    pub generator: GeneratorConfig,
    pub train_size: usize,
    pub n_targets: usize,
    pub n_members: usize,
    #[serde(default = "default_attacks")]
    pub attacks: Vec<AttackKind>,
    pub seed: u64,
    /// Records per target set; None runs record-level inference only.
    #[serde(default)]
    pub set_size: Option<usize>,
    /// When false, the sampled training rows are removed from the
    /// attacker's view of the auxiliary data (by row index).
    #[serde(default)]
    pub train_overlaps_aux: bool,
    #[serde(default = "default_shadow_runs")]
    pub shadow_runs: usize,
    /// Activation sigmoid sharpness.
    #[serde(default = "default_sharpness")]
    pub sharpness: f64,
    /// Minimum selection count for the log-aggregated attack.
    #[serde(default = "default_log_threshold")]
    pub log_threshold: u32,
}

impl TrialConfig {
    pub fn new(
        generator: GeneratorConfig,
        train_size: usize,
        n_targets: usize,
        n_members: usize,
        seed: u64,
    ) -> Self {
        TrialConfig {
            generator,
            train_size,
            n_targets,
            n_members,
            attacks: default_attacks(),
            seed,
            set_size: None,
            train_overlaps_aux: false,
            shadow_runs: default_shadow_runs(),
            sharpness: default_sharpness(),
            log_threshold: default_log_threshold(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct StageRuntimes {
    /// Shadow profiling; zero when a cached profile was supplied.
    pub shadow_secs: f64,
    /// Scoring plus activation.
    pub zeta_secs: f64,
    pub total_secs: f64,
}

/// Everything one attack produced in one trial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttackReport {
    pub attack: AttackKind,
    /// Per-target scores with probabilities and ground-truth labels.
    pub scores: Vec<TargetScore>,
    pub auc: f64,
    pub ma: f64,
    pub roc: Vec<(f64, f64)>,
    /// Set-level metrics, present when the trial targeted sets.
    pub set_auc: Option<f64>,
    pub set_ma: Option<f64>,
    pub runtimes: StageRuntimes,
}

#[derive(Clone, Debug)]
pub struct TrialResult {
    /// One report per configured attack, in configuration order.
    pub reports: Vec<AttackReport>,
    /// Per-column 1-D transport distance between synth and train.
    pub quality: f64,
    pub fit_secs: f64,
}

struct TrialPlan {
    set_size: usize,
    member_records: usize,
    target_records: usize,
}

fn validate(cfg: &TrialConfig, aux: &Dataset) -> Result<TrialPlan> {
    if cfg.attacks.is_empty() {
        return Err(Error::Config("trial needs at least one attack".into()));
    }
    let s = cfg.set_size.unwrap_or(1);
    if s == 0 {
        return Err(Error::Config("set size must be at least 1".into()));
    }
    if cfg.n_members == 0 || cfg.n_members >= cfg.n_targets {
        return Err(Error::Config(format!(
            "need 0 < members < targets, got {} of {}",
            cfg.n_members, cfg.n_targets
        )));
    }
    let member_records = cfg.n_members * s;
    let target_records = cfg.n_targets * s;
    if target_records > cfg.train_size {
        return Err(Error::Config(format!(
            "{target_records} target records exceed the training size {}",
            cfg.train_size
        )));
    }
    if cfg.train_size > aux.n_rows() {
        return Err(Error::Config(format!(
            "training size {} exceeds aux rows {}",
            cfg.train_size,
            aux.n_rows()
        )));
    }
    let nonmember_pool = aux.n_rows() - cfg.train_size;
    if target_records - member_records > nonmember_pool {
        return Err(Error::Config(format!(
            "{} non-member records exceed the {} aux rows outside the training set",
            target_records - member_records,
            nonmember_pool
        )));
    }
    Ok(TrialPlan { set_size: s, member_records, target_records })
}

/// [`run_trial_with_profile`] building its own shadow profile.
pub fn run_trial(cfg: &TrialConfig, aux: &Dataset) -> Result<TrialResult> {
    run_trial_with_profile(cfg, aux, None)
}

/// Run one trial. Training rows are drawn from `aux`; targets mix exactly
/// the configured number of members (uniform over the training set) with
/// non-members (uniform over the rest of `aux`); every attack scores the
/// same synthetic dataset. A cached profile, when given, must match the
/// generator and sizes and zeroes the shadow stage's runtime.
pub fn run_trial_with_profile(
    cfg: &TrialConfig,
    aux: &Dataset,
    cached_profile: Option<&FPProfile>,
) -> Result<TrialResult> {
    let plan = validate(cfg, aux)?;

    let train_idx = aux.sample_indices(cfg.train_size, &mut stream(cfg.seed, "trial/train"))?;
    let train = aux.subset(&train_idx)?;
    let mut in_train = vec![false; aux.n_rows()];
    for &i in &train_idx {
        in_train[i] = true;
    }
    let complement: Vec<usize> = (0..aux.n_rows()).filter(|&i| !in_train[i]).collect();
    let attacker_owned;
    let attacker_aux = if cfg.train_overlaps_aux {
        aux
    } else {
        attacker_owned = aux.subset(&complement)?;
        &attacker_owned
    };

    let member_local = train.sample_indices(plan.member_records, &mut stream(cfg.seed, "trial/members"))?;
    let members = train.subset(&member_local)?;
    let nonmember_count = plan.target_records - plan.member_records;
    let picked = rand::seq::index::sample(
        &mut stream(cfg.seed, "trial/nonmembers"),
        complement.len(),
        nonmember_count,
    );
    let nonmember_idx: Vec<usize> = picked.iter().map(|i| complement[i]).collect();
    let targets = members.concat(&aux.subset(&nonmember_idx)?)?;
    let labels: Vec<bool> = (0..plan.target_records).map(|i| i < plan.member_records).collect();

    let fit_start = Instant::now();
    let mut gen_cfg = cfg.generator.clone();
    gen_cfg.seed = child_seed(cfg.seed, "trial/fit");
    let outcome = fit(&gen_cfg, &train, Mode::Full)?;
    let synth = sample(&outcome, gen_cfg.synth_rows, &mut stream(cfg.seed, "trial/synth"))?;
    let fit_secs = fit_start.elapsed().as_secs_f64();
    let quality = dataset_distance(&synth, &train)?;

    let needs_profile = cfg.attacks.iter().any(|a| a.uses_profile());
    let mut shadow_secs = 0.0;
    let built_profile;
    let profile: Option<&FPProfile> = if !needs_profile {
        None
    } else if let Some(p) = cached_profile {
        if p.kind != cfg.generator.kind
            || p.epsilon.to_bits() != cfg.generator.epsilon.to_bits()
            || p.train_size != cfg.train_size
        {
            return Err(Error::Config(format!(
                "cached profile ({}, eps {}, size {}) does not match the trial ({}, eps {}, size {})",
                p.kind, p.epsilon, p.train_size, cfg.generator.kind, cfg.generator.epsilon, cfg.train_size
            )));
        }
        Some(p)
    } else {
        let t0 = Instant::now();
        built_profile = shadow_profile(
            &cfg.generator,
            attacker_aux,
            cfg.train_size,
            cfg.shadow_runs,
            child_seed(cfg.seed, "trial/shadow"),
        )?;
        shadow_secs = t0.elapsed().as_secs_f64();
        Some(&built_profile)
    };

    let mf = plan.member_records as f64 / plan.target_records as f64;
    let sets: Option<(BTreeMap<u64, Vec<usize>>, Vec<bool>)> = cfg.set_size.map(|_| {
        let map = (0..cfg.n_targets)
            .map(|i| (i as u64, (i * plan.set_size..(i + 1) * plan.set_size).collect()))
            .collect();
        let set_labels = (0..cfg.n_targets).map(|i| i < cfg.n_members).collect();
        (map, set_labels)
    });

    let mut reports = Vec::with_capacity(cfg.attacks.len());
    for &attack in &cfg.attacks {
        let t0 = Instant::now();
        let mut scores = match attack {
            AttackKind::MamaMia => zeta(&synth, attacker_aux, profile.unwrap(), &targets)?,
            AttackKind::MamaMiaLog => {
                zeta_log(&synth, attacker_aux, profile.unwrap(), cfg.log_threshold, &targets)?
            }
            AttackKind::Domias => domias_score(&synth, attacker_aux, &targets)?,
            AttackKind::RandomFp => {
                let arbitrary = random_profile(
                    profile.unwrap(),
                    targets.schema(),
                    child_seed(cfg.seed, "trial/random-fp"),
                )?;
                zeta(&synth, attacker_aux, &arbitrary, &targets)?
            }
        };
        activate(&mut scores, cfg.sharpness, mf)?;
        for (s, &l) in scores.iter_mut().zip(&labels) {
            s.label = Some(l);
        }
        let zeta_secs = t0.elapsed().as_secs_f64();

        let probs: Vec<f64> = scores.iter().map(|s| s.probability.unwrap()).collect();
        let (set_auc, set_ma) = match &sets {
            None => (None, None),
            Some((map, set_labels)) => {
                let per_set = set_mi(&scores, map)?;
                let set_probs: Vec<f64> = per_set.iter().map(|&(_, p)| p).collect();
                (
                    Some(auc(&set_probs, set_labels)?),
                    Some(membership_advantage(&set_probs, set_labels)?),
                )
            }
        };
        let attack_shadow = if attack.uses_profile() { shadow_secs } else { 0.0 };
        reports.push(AttackReport {
            attack,
            auc: auc(&probs, &labels)?,
            ma: membership_advantage(&probs, &labels)?,
            roc: roc(&probs, &labels)?,
            set_auc,
            set_ma,
            runtimes: StageRuntimes {
                shadow_secs: attack_shadow,
                zeta_secs,
                total_secs: attack_shadow + zeta_secs,
            },
            scores,
        });
    }

    Ok(TrialResult { reports, quality, fit_secs })
}
