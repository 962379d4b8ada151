//! Synthetic populations with a known dependency structure.
//!
//! Experiments need a large "world" dataset whose feature correlations are
//! under our control: strong enough that marginals-based generators pick a
//! predictable structure, varied enough that attacks have signal to find.
//! The sampler draws each row ancestrally over a dependency forest. A child
//! copies a permuted image of its parent's value with probability equal to
//! the edge's coupling strength and falls back to a uniform draw otherwise,
//! so coupling 0 is independence and coupling 1 is a deterministic map.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::schema::{Cat, Schema};
use crate::{rng, Error, Result};

/// One dependency edge of the population forest.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PopulationEdge {
    pub parent: usize,
    pub child: usize,
    /// Probability that the child copies (a permutation of) the parent's
    /// value instead of drawing uniformly. In [0, 1].
    pub coupling: f64,
}

/// Shape of a synthetic population.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub rows: usize,
    /// Domain size per feature.
    pub domains: Vec<usize>,
    /// Dependency forest; at most one parent per child, no cycles.
    pub edges: Vec<PopulationEdge>,
    /// Feature names; defaults to f0, f1, ...
    #[serde(default)]
    pub names: Option<Vec<String>>,
    pub seed: u64,
}

impl PopulationConfig {
    fn validate(&self) -> Result<Vec<Option<usize>>> {
        let l = self.domains.len();
        if l == 0 {
            return Err(Error::Config("population needs at least one feature".into()));
        }
        if self.domains.iter().any(|&m| m < 2) {
            return Err(Error::Config("population domains must be at least 2".into()));
        }
        if let Some(names) = &self.names {
            if names.len() != l {
                return Err(Error::Config("name count does not match domain count".into()));
            }
        }
        let mut edge_idx = vec![None; l];
        for (i, e) in self.edges.iter().enumerate() {
            if e.parent >= l || e.child >= l || e.parent == e.child {
                return Err(Error::Config(format!("bad edge {} -> {}", e.parent, e.child)));
            }
            if !(0.0..=1.0).contains(&e.coupling) {
                return Err(Error::Config(format!("coupling {} outside [0, 1]", e.coupling)));
            }
            if edge_idx[e.child].is_some() {
                return Err(Error::Config(format!("feature {} has two parents", e.child)));
            }
            edge_idx[e.child] = Some(i);
        }
        // Walking parent links from any node must terminate at a root.
        for start in 0..l {
            let mut cur = start;
            let mut steps = 0;
            while let Some(i) = edge_idx[cur] {
                cur = self.edges[i].parent;
                steps += 1;
                if steps > l {
                    return Err(Error::Config("population edges contain a cycle".into()));
                }
            }
        }
        Ok(edge_idx)
    }
}

/// Draw a population ancestrally. Deterministic in `cfg.seed`.
pub fn synthesize_population(cfg: &PopulationConfig) -> Result<Dataset> {
    let edge_idx = cfg.validate()?;
    let seed = cfg.seed;
    let l = cfg.domains.len();
    let names: Vec<String> = match &cfg.names {
        Some(n) => n.clone(),
        None => (0..l).map(|i| format!("f{i}")).collect(),
    };
    let schema = Arc::new(Schema::uniform(&names, &cfg.domains)?);

    // One fixed value permutation per edge: the child's coupled value is
    // perm[parent mod child_domain], making the dependence nontrivial while
    // keeping child marginals close to uniform.
    let mut perms: Vec<Vec<Cat>> = Vec::with_capacity(cfg.edges.len());
    for (i, e) in cfg.edges.iter().enumerate() {
        let m = cfg.domains[e.child];
        let mut perm: Vec<Cat> = (0..m as Cat).collect();
        perm.shuffle(&mut rng::stream_idx(seed, "population/perm", i as u64));
        perms.push(perm);
    }

    // Topological order: parents before children.
    let mut order: Vec<usize> = Vec::with_capacity(l);
    let mut placed = vec![false; l];
    while order.len() < l {
        for f in 0..l {
            if placed[f] {
                continue;
            }
            let ready = match edge_idx[f] {
                None => true,
                Some(i) => placed[cfg.edges[i].parent],
            };
            if ready {
                placed[f] = true;
                order.push(f);
            }
        }
    }

    let mut r = rng::stream(seed, "population/draw");
    let mut data = vec![0 as Cat; cfg.rows * l];
    let mut row = vec![0 as Cat; l];
    for i in 0..cfg.rows {
        for &f in &order {
            let m = cfg.domains[f];
            row[f] = match edge_idx[f] {
                None => r.gen_range(0..m) as Cat,
                Some(ei) => {
                    let e = &cfg.edges[ei];
                    if r.gen::<f64>() < e.coupling {
                        perms[ei][row[e.parent] as usize % m]
                    } else {
                        r.gen_range(0..m) as Cat
                    }
                }
            };
        }
        data[i * l..(i + 1) * l].copy_from_slice(&row);
    }
    Dataset::new(schema, data)
}
