//! Differentially private synthetic-data generators.
//!
//! All three generators follow the same select-measure-sample skeleton:
//! spend half the budget choosing which focal points to preserve, half on
//! Laplace-noised measurements of them, then sample synthetic rows from the
//! fitted model. [`fit`] instruments the selection stage so shadow modelling
//! can stop right after it ([`Mode::FpOnly`]): the focal-point list is
//! identical between modes because selection draws from its own RNG stream.

pub mod gsd;
pub mod mst;
pub mod privbayes;

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::dp::Budget;
use crate::stats::FocalPoint;
use crate::{Error, Result};

/// The three supported generator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    #[serde(rename = "mst")]
    MstLike,
    #[serde(rename = "privbayes")]
    PrivBayesLike,
    #[serde(rename = "gsd")]
    GsdLike,
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GeneratorKind::MstLike => "mst",
            GeneratorKind::PrivBayesLike => "privbayes",
            GeneratorKind::GsdLike => "gsd",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mst" => Ok(GeneratorKind::MstLike),
            "privbayes" => Ok(GeneratorKind::PrivBayesLike),
            "gsd" => Ok(GeneratorKind::GsdLike),
            other => Err(Error::Config(format!("unknown generator kind {other:?}"))),
        }
    }
}

/// Evolutionary-search settings for the GSD-style generator.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GsdParams {
    pub population: usize,
    pub elites: usize,
    pub generations: usize,
    /// Stop after this many generations without a > 1e-12 fitness improvement.
    pub patience: usize,
    /// Number of one-hot columns per query marginal.
    pub arity: usize,
    /// Number of query marginals to select and measure.
    pub queries: usize,
    /// Adaptive selection rounds.
    pub rounds: usize,
}

impl Default for GsdParams {
    fn default() -> Self {
        GsdParams { population: 50, elites: 5, generations: 20_000, patience: 500, arity: 2, queries: 64, rounds: 4 }
    }
}

/// Everything a generator run needs besides the training data.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub epsilon: f64,
    pub synth_rows: usize,
    pub seed: u64,
    /// PrivBayes: fixed parent cap instead of the epsilon schedule.
    #[serde(default)]
    pub parent_cap: Option<usize>,
    /// MST: manually pinned spanning-tree edges, skipping private edge
    /// selection. Fixing the structure hides it from shadow modelling.
    #[serde(default)]
    pub manual_edges: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub gsd: GsdParams,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind, epsilon: f64, synth_rows: usize, seed: u64) -> Self {
        GeneratorConfig {
            kind,
            epsilon,
            synth_rows,
            seed,
            parent_cap: None,
            manual_edges: None,
            gsd: GsdParams::default(),
        }
    }
}

/// Fit everything, or stop after focal-point selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Full,
    FpOnly,
}

/// Kind-specific fitted artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Model {
    Tree(mst::TreeModel),
    Net(privbayes::BayesNet),
    /// The evolved dataset itself plus the targets it was fit against.
    Evolved { targets: gsd::GsdTargets, fitness: f64, rows: Vec<crate::data::Cat>, schema: std::sync::Arc<crate::data::Schema> },
}

/// Result of [`fit`]: the selected focal points, the fitted model (absent in
/// focal-point-only mode), the budget ledger, and wall time.
#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub kind: GeneratorKind,
    pub focal_points: Vec<FocalPoint>,
    pub model: Option<Model>,
    pub budget: Budget,
    pub wall_secs: f64,
}

impl FitOutcome {
    /// JSON summary (focal points + ledger) for profile caching.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Repr<'a> {
            kind: GeneratorKind,
            focal_points: &'a [FocalPoint],
            ledger: &'a [(String, f64)],
            epsilon: f64,
            wall_secs: f64,
        }
        let repr = Repr {
            kind: self.kind,
            focal_points: &self.focal_points,
            ledger: self.budget.ledger(),
            epsilon: self.budget.total(),
            wall_secs: self.wall_secs,
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }
}

/// Conservative sensitivity surrogate for mutual-information scores under
/// add/remove-one adjacency.
pub(crate) fn mi_sensitivity(n: usize) -> f64 {
    if n >= 2 {
        (n as f64).ln() / n as f64
    } else {
        1.0
    }
}

/// Draw an index from a normalized probability vector.
pub(crate) fn sample_cat<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen::<f64>();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Fit a generator on the training data. `FpOnly` performs selection only
/// and returns no model; it consumes exactly the same selection randomness
/// as a full fit, so the focal-point list is identical.
pub fn fit(cfg: &GeneratorConfig, train: &Dataset, mode: Mode) -> Result<FitOutcome> {
    if train.n_rows() == 0 {
        return Err(Error::Data("cannot fit on an empty training set".into()));
    }
    let start = Instant::now();
    let mut outcome = match cfg.kind {
        GeneratorKind::MstLike => mst::fit(cfg, train, mode)?,
        GeneratorKind::PrivBayesLike => privbayes::fit(cfg, train, mode)?,
        GeneratorKind::GsdLike => gsd::fit(cfg, train, mode)?,
    };
    outcome.wall_secs = start.elapsed().as_secs_f64();
    Ok(outcome)
}

/// Sample `n` synthetic rows from a full-mode fit.
pub fn sample<R: Rng>(outcome: &FitOutcome, n: usize, rng: &mut R) -> Result<Dataset> {
    let Some(model) = &outcome.model else {
        return Err(Error::Config("cannot sample from a focal-point-only fit".into()));
    };
    match model {
        Model::Tree(m) => mst::mst_sample(m, n, rng),
        Model::Net(m) => privbayes::pb_sample(m, n, rng),
        Model::Evolved { rows, schema, .. } => gsd::resample(rows, schema, n, rng),
    }
}
