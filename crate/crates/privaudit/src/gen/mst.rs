//! Spanning-tree generator: private Kruskal over pairwise mutual
//! information, Laplace-noised 1-way and edge 2-way tables, ancestral
//! sampling from the tree.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Cat, Dataset, Schema};
use crate::dp::{exponential_select, laplace_counts, Budget, NoisyMeasurement};
use crate::rng::stream;
use crate::stats::{estimate_marginal, mutual_information, FocalPoint};
use crate::{Error, Result};

use super::{mi_sensitivity, sample_cat, FitOutcome, GeneratorConfig, GeneratorKind, Mode, Model};

/// Fitted spanning-tree model.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TreeModel {
    pub schema: Arc<Schema>,
    /// Tree edges with endpoints sorted ascending.
    pub edges: Vec<(usize, usize)>,
    /// One noisy 1-way table per feature, index-aligned with the schema.
    pub one_way: Vec<NoisyMeasurement>,
    /// One noisy 2-way table per edge, index-aligned with `edges`.
    pub two_way: Vec<NoisyMeasurement>,
    /// Sampling starts here: the feature with the largest domain.
    pub root: usize,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Pick `l - 1` spanning-tree edges with the exponential mechanism over
/// pairwise mutual information, Kruskal style: each pick only considers
/// pairs that straddle two components.
pub fn select_edges<R: Rng>(train: &Dataset, eps_select: f64, rng: &mut R) -> Result<Vec<(usize, usize)>> {
    let l = train.schema().len();
    if l < 2 {
        return Err(Error::Config("spanning-tree generator needs at least 2 features".into()));
    }
    let mut pairs = Vec::with_capacity(l * (l - 1) / 2);
    for i in 0..l {
        for j in (i + 1)..l {
            pairs.push(((i, j), mutual_information(train, i, j)?));
        }
    }
    let eps_pick = eps_select / (l - 1) as f64;
    let sens = mi_sensitivity(train.n_rows());
    let mut uf = UnionFind::new(l);
    let mut edges = Vec::with_capacity(l - 1);
    while edges.len() < l - 1 {
        let mut idx = Vec::new();
        let mut scores = Vec::new();
        for (k, &((i, j), mi)) in pairs.iter().enumerate() {
            if uf.find(i) != uf.find(j) {
                idx.push(k);
                scores.push(mi);
            }
        }
        let pick = idx[exponential_select(&scores, eps_pick, sens, rng)?];
        let (i, j) = pairs[pick].0;
        uf.union(i, j);
        edges.push((i, j));
    }
    Ok(edges)
}

fn check_spanning_tree(l: usize, edges: &[(usize, usize)]) -> Result<()> {
    if edges.len() != l.saturating_sub(1) {
        return Err(Error::Config(format!(
            "manual edge list must contain {} edges, got {}",
            l.saturating_sub(1),
            edges.len()
        )));
    }
    let mut uf = UnionFind::new(l);
    for &(i, j) in edges {
        if i >= l || j >= l || i == j {
            return Err(Error::Config(format!("edge ({i}, {j}) is not valid for {l} features")));
        }
        if !uf.union(i, j) {
            return Err(Error::Config(format!("manual edges contain a cycle at ({i}, {j})")));
        }
    }
    Ok(())
}

/// Measure every 1-way table plus one 2-way table per edge, each at
/// `eps_measure / (2l - 1)` with sensitivity 1.
pub fn measure<R: Rng>(
    train: &Dataset,
    edges: &[(usize, usize)],
    eps_measure: f64,
    rng: &mut R,
) -> Result<(Vec<NoisyMeasurement>, Vec<NoisyMeasurement>)> {
    let l = train.schema().len();
    let eps_table = eps_measure / (2 * l - 1) as f64;
    let mut one_way = Vec::with_capacity(l);
    for f in 0..l {
        let table = estimate_marginal(train, &[f], 0.0)?;
        one_way.push(laplace_counts(&table, eps_table, 1.0, rng)?);
    }
    let mut two_way = Vec::with_capacity(edges.len());
    for &(i, j) in edges {
        let table = estimate_marginal(train, &[i, j], 0.0)?;
        two_way.push(laplace_counts(&table, eps_table, 1.0, rng)?);
    }
    Ok((one_way, two_way))
}

pub(super) fn fit(cfg: &GeneratorConfig, train: &Dataset, mode: Mode) -> Result<FitOutcome> {
    let l = train.schema().len();
    if l < 2 {
        return Err(Error::Config("spanning-tree generator needs at least 2 features".into()));
    }
    let mut budget = Budget::new(cfg.epsilon)?;
    let edges = if let Some(manual) = &cfg.manual_edges {
        check_spanning_tree(l, manual)?;
        let mut sorted: Vec<(usize, usize)> =
            manual.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
        sorted.sort_unstable();
        sorted
    } else {
        let eps_select = budget.spend("selection", 0.5)?;
        let mut sel_rng = stream(cfg.seed, "mst/select");
        select_edges(train, eps_select, &mut sel_rng)?
    };
    let focal_points: Vec<FocalPoint> =
        edges.iter().map(|&(i, j)| FocalPoint::marginal(&[i, j])).collect::<Result<_>>()?;
    if mode == Mode::FpOnly {
        return Ok(FitOutcome {
            kind: GeneratorKind::MstLike,
            focal_points,
            model: None,
            budget,
            wall_secs: 0.0,
        });
    }
    let eps_measure = budget.spend("measurement", 0.5)?;
    let mut meas_rng = stream(cfg.seed, "mst/measure");
    let (one_way, two_way) = measure(train, &edges, eps_measure, &mut meas_rng)?;
    let root = (0..l).max_by_key(|&f| train.schema().domain(f)).unwrap();
    let model = TreeModel { schema: Arc::clone(train.schema()), edges, one_way, two_way, root };
    Ok(FitOutcome {
        kind: GeneratorKind::MstLike,
        focal_points,
        model: Some(Model::Tree(model)),
        budget,
        wall_secs: 0.0,
    })
}

/// Per-feature clipped 1-way distributions and, per directed tree edge,
/// a parent-value-indexed conditional derived from the clipped 2-way table.
struct SamplingPlan {
    /// (child, parent, conditional rows indexed by parent value).
    steps: Vec<(usize, usize, Vec<Vec<f64>>)>,
    root_probs: Vec<f64>,
}

fn build_plan(model: &TreeModel) -> Result<SamplingPlan> {
    let l = model.schema.len();
    let fallback: Vec<Vec<f64>> =
        model.one_way.iter().map(|m| m.clipped_probs()).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); l];
    for (e, &(i, j)) in model.edges.iter().enumerate() {
        adj[i].push((j, e));
        adj[j].push((i, e));
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut steps = Vec::with_capacity(l.saturating_sub(1));
    let mut visited = vec![false; l];
    let mut queue = std::collections::VecDeque::from([model.root]);
    visited[model.root] = true;
    while let Some(parent) = queue.pop_front() {
        for &(child, e) in &adj[parent] {
            if visited[child] {
                continue;
            }
            visited[child] = true;
            let (i, j) = model.edges[e];
            let joint = model.two_way[e].clipped_probs();
            let (m_i, m_j) = (model.schema.domain(i), model.schema.domain(j));
            let m_parent = if parent == i { m_i } else { m_j };
            let m_child = if parent == i { m_j } else { m_i };
            let mut rows = Vec::with_capacity(m_parent);
            for pv in 0..m_parent {
                let mut row: Vec<f64> = (0..m_child)
                    .map(|cv| {
                        // joint is laid out with feature i as the leading axis
                        if parent == i { joint[pv * m_j + cv] } else { joint[cv * m_j + pv] }
                    })
                    .collect();
                let total: f64 = row.iter().sum();
                if total > 0.0 {
                    for p in &mut row {
                        *p /= total;
                    }
                } else {
                    row = fallback[child].clone();
                }
                rows.push(row);
            }
            steps.push((child, parent, rows));
            queue.push_back(child);
        }
    }
    if visited.iter().any(|v| !v) {
        return Err(Error::Runtime("tree model does not span all features".into()));
    }
    Ok(SamplingPlan { steps, root_probs: fallback[model.root].clone() })
}

/// Ancestral sampling: draw the root from its clipped 1-way table, then each
/// child from the edge conditional given its parent's sampled value.
pub fn mst_sample<R: Rng>(model: &TreeModel, n: usize, rng: &mut R) -> Result<Dataset> {
    let plan = build_plan(model)?;
    let l = model.schema.len();
    let mut data = vec![0 as Cat; n * l];
    for r in 0..n {
        let row = &mut data[r * l..(r + 1) * l];
        row[model.root] = sample_cat(&plan.root_probs, rng) as Cat;
        for (child, parent, rows) in &plan.steps {
            let pv = row[*parent] as usize;
            row[*child] = sample_cat(&rows[pv], rng) as Cat;
        }
    }
    Dataset::new(Arc::clone(&model.schema), data)
}
