//! Focal-point profiles learned by shadow-modelling a generator.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Schema};
use crate::gen::{fit, GeneratorConfig, GeneratorKind, Mode};
use crate::rng::{child_seed_idx, stream_idx};
use crate::stats::{FocalPoint, OneHotMap};
use crate::{Error, Result};

/// How often each focal point was selected over repeated generator runs on
/// auxiliary samples. Counts are the attack weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FPProfile {
    pub kind: GeneratorKind,
    pub epsilon: f64,
    pub train_size: usize,
    /// Number of shadow runs.
    pub runs: usize,
    pub seed: u64,
    /// Selection counts, sorted by focal point; each count is in 1..=runs.
    counts: Vec<(FocalPoint, u32)>,
}

impl FPProfile {
    pub fn new(
        kind: GeneratorKind,
        epsilon: f64,
        train_size: usize,
        runs: usize,
        seed: u64,
        mut counts: Vec<(FocalPoint, u32)>,
    ) -> Result<Self> {
        counts.sort_by(|a, b| a.0.cmp(&b.0));
        for w in counts.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Data(format!("duplicate focal point {} in profile", w[0].0)));
            }
        }
        if counts.iter().any(|&(_, c)| c == 0 || c as usize > runs) {
            return Err(Error::Data("profile counts must lie in 1..=runs".into()));
        }
        Ok(FPProfile { kind, epsilon, train_size, runs, seed, counts })
    }

    /// (focal point, weight) pairs in a fixed deterministic order.
    pub fn iter(&self) -> impl Iterator<Item = (&FocalPoint, u32)> {
        self.counts.iter().map(|(fp, c)| (fp, *c))
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count_of(&self, fp: &FocalPoint) -> u32 {
        self.counts
            .binary_search_by(|(f, _)| f.cmp(fp))
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Sum of all weights; for a spanning-tree profile this is
    /// `runs * (l - 1)`.
    pub fn total_weight(&self) -> f64 {
        self.counts.iter().map(|&(_, c)| c as f64).sum()
    }

    /// Fraction of focal points selected in at least `threshold` of runs.
    pub fn stable_fraction(&self, threshold: f64) -> f64 {
        if self.counts.is_empty() {
            return 0.0;
        }
        let bar = threshold * self.runs as f64;
        let stable = self.counts.iter().filter(|&&(_, c)| c as f64 >= bar).count();
        stable as f64 / self.counts.len() as f64
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: FPProfile = serde_json::from_str(s)?;
        FPProfile::new(p.kind, p.epsilon, p.train_size, p.runs, p.seed, p.counts)
    }
}

/// Run the generator `runs` times in focal-point-only mode on fresh uniform
/// samples of `aux` and count every selected focal point. Runs execute in
/// parallel; counting is order-independent, so the result only depends on
/// the seed.
pub fn shadow_profile(
    cfg: &GeneratorConfig,
    aux: &Dataset,
    train_size: usize,
    runs: usize,
    seed: u64,
) -> Result<FPProfile> {
    if runs == 0 {
        return Err(Error::Config("shadow profiling needs at least one run".into()));
    }
    if train_size > aux.n_rows() {
        return Err(Error::Config(format!(
            "shadow train size {train_size} exceeds aux rows {}",
            aux.n_rows()
        )));
    }
    let per_run: Vec<Result<Vec<FocalPoint>>> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut sample_rng = stream_idx(seed, "shadow/train", r as u64);
            let train = aux.sample_rows(train_size, &mut sample_rng)?;
            let mut run_cfg = cfg.clone();
            run_cfg.seed = child_seed_idx(seed, "shadow/fit", r as u64);
            let outcome = fit(&run_cfg, &train, Mode::FpOnly)
                .map_err(|e| Error::Runtime(format!("shadow run {r}: {e}")))?;
            Ok(outcome.focal_points)
        })
        .collect();
    let mut counts: std::collections::BTreeMap<FocalPoint, u32> = std::collections::BTreeMap::new();
    for run in per_run {
        for fp in run? {
            *counts.entry(fp).or_insert(0) += 1;
        }
    }
    FPProfile::new(cfg.kind, cfg.epsilon, train_size, runs, seed, counts.into_iter().collect())
}

/// Ablation control: a profile with the same weight multiset as `profile`
/// but uniformly random focal points of the matching shape (feature pairs
/// for trees, child-with-parents for networks, one-hot column tuples for
/// the evolutionary generator).
pub fn random_profile(profile: &FPProfile, schema: &Schema, seed: u64) -> Result<FPProfile> {
    let l = schema.len();
    let mut rng = crate::rng::stream(seed, "random-profile");
    let mut fresh: Vec<(FocalPoint, u32)> = Vec::with_capacity(profile.len());
    let mut used: std::collections::BTreeSet<FocalPoint> = std::collections::BTreeSet::new();
    let width = OneHotMap::new(schema).width();
    for (fp, w) in profile.iter() {
        // Rejection-sample a fresh focal point of the same shape.
        for attempt in 0..10_000 {
            let cand = match (profile.kind, fp) {
                (GeneratorKind::GsdLike, FocalPoint::Marginal { features }) => {
                    let k = features.len();
                    FocalPoint::marginal(&distinct(&mut rng, k, width)?)?
                }
                (_, FocalPoint::Marginal { features }) => {
                    let k = features.len();
                    FocalPoint::marginal(&distinct(&mut rng, k, l)?)?
                }
                (_, FocalPoint::Conditional { parents, .. }) => {
                    let vars = distinct(&mut rng, parents.len() + 1, l)?;
                    let child = vars[rng.gen_range(0..vars.len())];
                    let ps: Vec<usize> = vars.into_iter().filter(|&v| v != child).collect();
                    FocalPoint::conditional(child, &ps)?
                }
            };
            if used.insert(cand.clone()) {
                fresh.push((cand, w));
                break;
            }
            if attempt == 9_999 {
                return Err(Error::Runtime("could not draw enough distinct random focal points".into()));
            }
        }
    }
    FPProfile::new(profile.kind, profile.epsilon, profile.train_size, profile.runs, seed, fresh)
}

/// `k` distinct indices below `bound`, sorted.
fn distinct<R: Rng>(rng: &mut R, k: usize, bound: usize) -> Result<Vec<usize>> {
    if k > bound {
        return Err(Error::Config(format!("cannot draw {k} distinct indices below {bound}")));
    }
    let mut picked = Vec::with_capacity(k);
    while picked.len() < k {
        let v = rng.gen_range(0..bound);
        if !picked.contains(&v) {
            picked.push(v);
        }
    }
    picked.sort_unstable();
    Ok(picked)
}
