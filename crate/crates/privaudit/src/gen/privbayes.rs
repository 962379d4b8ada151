//! Bayesian-network generator: greedy private structure search with a
//! budget-dependent parent cap, noisy conditional tables, ancestral
//! sampling along the construction order.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Cat, Dataset, Schema};
use crate::dp::{exponential_select, laplace_counts, Budget, NoisyMeasurement};
use crate::rng::stream;
use crate::stats::{entropy, estimate_conditional, estimate_marginal, FocalPoint};
use crate::{Error, Result};

use super::{mi_sensitivity, sample_cat, FitOutcome, GeneratorConfig, GeneratorKind, Mode, Model};

/// Structure search keeps at most this many (child, parent set) candidates
/// per step, ranked by exact mutual information.
const CANDIDATE_CAP: usize = 5000;

/// Fitted network: nodes in construction order, each with its parent set
/// (a subset of earlier nodes) and a noisy joint table over parents + node.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BayesNet {
    pub schema: Arc<Schema>,
    /// Features in the order they were added to the network.
    pub order: Vec<usize>,
    /// Parent sets indexed by feature, sorted ascending.
    pub parents: Vec<Vec<usize>>,
    /// One noisy table per node, aligned with `order`. The node's own axis
    /// is last.
    pub measurements: Vec<NoisyMeasurement>,
}

/// Parent cap schedule: generous budgets afford deeper conditionals.
/// Clamped to [1, 4]; an explicit override wins.
pub fn parent_cap(epsilon: f64, override_cap: Option<usize>) -> usize {
    if let Some(k) = override_cap {
        return k.max(1);
    }
    if epsilon.is_infinite() {
        return 4;
    }
    let t = (epsilon.log10() + 1e-12).floor() as i64 + 2;
    t.clamp(1, 4) as usize
}

fn mask_features(mask: u64) -> Vec<usize> {
    (0..64).filter(|f| mask >> f & 1 == 1).collect()
}

/// Entropy of a feature subset, memoized by bitmask.
struct EntropyCache<'a> {
    data: &'a Dataset,
    cache: HashMap<u64, f64>,
}

impl<'a> EntropyCache<'a> {
    fn new(data: &'a Dataset) -> Self {
        EntropyCache { data, cache: HashMap::new() }
    }

    fn get(&mut self, mask: u64) -> Result<f64> {
        if let Some(&h) = self.cache.get(&mask) {
            return Ok(h);
        }
        let h = if mask == 0 { 0.0 } else { entropy(self.data, &mask_features(mask))? };
        self.cache.insert(mask, h);
        Ok(h)
    }

    /// I(child; parents) = H(child) + H(parents) - H(parents + child).
    fn mi(&mut self, child: usize, parent_mask: u64) -> Result<f64> {
        if parent_mask == 0 {
            return Ok(0.0);
        }
        let hc = self.get(1 << child)?;
        let hp = self.get(parent_mask)?;
        let hj = self.get(parent_mask | 1 << child)?;
        Ok(hc + hp - hj)
    }
}

/// Greedy structure search. The first node is drawn uniformly; each later
/// step scores every (unplaced child, parent subset of placed nodes with at
/// most `cap` members, empty allowed) by mutual information and picks one
/// with the exponential mechanism at `eps_select / (l - 1)`.
pub fn build_structure<R: Rng>(
    train: &Dataset,
    eps_select: f64,
    cap: usize,
    rng: &mut R,
) -> Result<(Vec<usize>, Vec<Vec<usize>>)> {
    let l = train.schema().len();
    if l > 48 {
        return Err(Error::Config(format!("structure search supports at most 48 features, got {l}")));
    }
    let mut cache = EntropyCache::new(train);
    let mut order = Vec::with_capacity(l);
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); l];
    let first = rng.gen_range(0..l);
    order.push(first);
    let mut placed_mask: u64 = 1 << first;
    let eps_step = if l > 1 { eps_select / (l - 1) as f64 } else { eps_select };
    let sens = mi_sensitivity(train.n_rows());
    while order.len() < l {
        let placed: Vec<usize> = mask_features(placed_mask);
        let mut candidates: Vec<(usize, u64, f64)> = Vec::new();
        for child in 0..l {
            if placed_mask >> child & 1 == 1 {
                continue;
            }
            for mask in subsets_up_to(&placed, cap) {
                let score = cache.mi(child, mask)?;
                candidates.push((child, mask, score));
            }
        }
        if candidates.len() > CANDIDATE_CAP {
            let mut ranked: Vec<usize> = (0..candidates.len()).collect();
            ranked.sort_by(|&a, &b| {
                candidates[b].2.partial_cmp(&candidates[a].2).unwrap().then(a.cmp(&b))
            });
            ranked.truncate(CANDIDATE_CAP);
            ranked.sort_unstable();
            let kept: Vec<(usize, u64, f64)> = ranked.iter().map(|&i| candidates[i]).collect();
            candidates = kept;
        }
        let scores: Vec<f64> = candidates.iter().map(|c| c.2).collect();
        let pick = exponential_select(&scores, eps_step, sens, rng)?;
        let (child, mask, _) = candidates[pick];
        order.push(child);
        parents[child] = mask_features(mask);
        placed_mask |= 1 << child;
    }
    Ok((order, parents))
}

/// All subsets of `items` with at most `cap` members, in ascending bitmask
/// order (so the empty set comes first).
fn subsets_up_to(items: &[usize], cap: usize) -> Vec<u64> {
    let k = items.len();
    let mut out = Vec::new();
    for choose in 0u64..(1 << k) {
        if choose.count_ones() as usize > cap {
            continue;
        }
        let mut mask = 0u64;
        for (bit, &f) in items.iter().enumerate() {
            if choose >> bit & 1 == 1 {
                mask |= 1 << f;
            }
        }
        out.push(mask);
    }
    out.sort_unstable();
    out
}

/// One noisy joint table per node at `eps_measure / l`, sensitivity 1,
/// measured in construction order.
pub fn measure<R: Rng>(
    train: &Dataset,
    order: &[usize],
    parents: &[Vec<usize>],
    eps_measure: f64,
    rng: &mut R,
) -> Result<Vec<NoisyMeasurement>> {
    let l = order.len();
    let eps_node = eps_measure / l as f64;
    let mut out = Vec::with_capacity(l);
    for &node in order {
        let table = if parents[node].is_empty() {
            estimate_marginal(train, &[node], 0.0)?
        } else {
            estimate_conditional(train, node, &parents[node], 0.0)?
        };
        out.push(laplace_counts(&table, eps_node, 1.0, rng)?);
    }
    Ok(out)
}

pub(super) fn fit(cfg: &GeneratorConfig, train: &Dataset, mode: Mode) -> Result<FitOutcome> {
    let l = train.schema().len();
    let cap = parent_cap(cfg.epsilon, cfg.parent_cap);
    let mut budget = Budget::new(cfg.epsilon)?;
    let (order, parents) = if l > 1 {
        let eps_select = budget.spend("selection", 0.5)?;
        let mut sel_rng = stream(cfg.seed, "privbayes/select");
        build_structure(train, eps_select, cap, &mut sel_rng)?
    } else {
        (vec![0], vec![Vec::new()])
    };
    let mut focal_points = Vec::with_capacity(l);
    for &node in &order {
        let fp = if parents[node].is_empty() {
            FocalPoint::marginal(&[node])?
        } else {
            FocalPoint::conditional(node, &parents[node])?
        };
        focal_points.push(fp);
    }
    if mode == Mode::FpOnly {
        return Ok(FitOutcome {
            kind: GeneratorKind::PrivBayesLike,
            focal_points,
            model: None,
            budget,
            wall_secs: 0.0,
        });
    }
    let eps_measure = budget.spend("measurement", 0.5)?;
    let mut meas_rng = stream(cfg.seed, "privbayes/measure");
    let measurements = measure(train, &order, &parents, eps_measure, &mut meas_rng)?;
    let model = BayesNet { schema: Arc::clone(train.schema()), order, parents, measurements };
    Ok(FitOutcome {
        kind: GeneratorKind::PrivBayesLike,
        focal_points,
        model: Some(Model::Net(model)),
        budget,
        wall_secs: 0.0,
    })
}

/// Ancestral sampling in construction order: each node is drawn from the
/// clipped conditional row selected by its parents' already-sampled values.
pub fn pb_sample<R: Rng>(net: &BayesNet, n: usize, rng: &mut R) -> Result<Dataset> {
    let l = net.schema.len();
    // Precompute clipped conditional rows and parent radix strides per node.
    let mut node_rows: Vec<Vec<Vec<f64>>> = Vec::with_capacity(l);
    for meas in &net.measurements {
        node_rows.push(meas.conditional_rows());
    }
    let mut data = vec![0 as Cat; n * l];
    for r in 0..n {
        let row = &mut data[r * l..(r + 1) * l];
        for (pos, &node) in net.order.iter().enumerate() {
            let ps = &net.parents[node];
            let mut code = 0usize;
            for &p in ps {
                code = code * net.schema.domain(p) + row[p] as usize;
            }
            let probs = &node_rows[pos][code];
            row[node] = sample_cat(probs, rng) as Cat;
        }
    }
    Dataset::new(Arc::clone(&net.schema), data)
}
