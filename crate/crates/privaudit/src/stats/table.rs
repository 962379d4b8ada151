//! Probability tables over focal points.
//!
//! A table stores raw (possibly fractional) counts sparsely over the cells of
//! its focal point and answers smoothed probability queries: marginals as
//! `(count + pseudo) / (n + pseudo * cells)`, conditionals normalized per
//! parent tuple with a uniform fallback when a parent tuple has no mass.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::focal::FocalPoint;
use super::onehot::OneHotMap;
use crate::data::{Cat, Dataset, Schema};
use crate::{Error, Result};

/// Hard cap on full-domain cell counts; everything measured here is a small
/// marginal or conditional, so a blowup signals a config mistake.
const MAX_CELLS: u128 = 1 << 26;

#[derive(Clone, Debug)]
enum Axes {
    /// Each axis is a schema feature.
    Features(Vec<usize>),
    /// Each axis is a binary one-hot column, decoded to (feature, category).
    OneHot(Vec<(usize, Cat)>),
}

/// Counts and smoothed probabilities over one focal point.
#[derive(Clone, Debug)]
pub struct ProbabilityTable {
    fp: FocalPoint,
    axes: Axes,
    domains: Vec<usize>,
    counts: HashMap<u64, f64>,
    /// For conditionals: counts marginalized over the child axis.
    parent_counts: HashMap<u64, f64>,
    /// Child domain size; 0 marks a marginal table.
    child_m: usize,
    n: f64,
    pseudo: f64,
}

impl ProbabilityTable {
    fn build(fp: FocalPoint, axes: Axes, domains: Vec<usize>, child_m: usize, d: &Dataset, pseudo: f64) -> Result<Self> {
        if pseudo < 0.0 {
            return Err(Error::Config("pseudo-count must be non-negative".into()));
        }
        if d.n_rows() == 0 && pseudo == 0.0 {
            return Err(Error::Data("degenerate estimate: empty dataset and zero pseudo-count".into()));
        }
        let cells = domains.iter().fold(1u128, |a, &m| a.saturating_mul(m as u128));
        if cells == 0 || cells > MAX_CELLS {
            return Err(Error::Config(format!("focal point spans {cells} cells")));
        }
        let mut t = ProbabilityTable {
            fp,
            axes,
            domains,
            counts: HashMap::new(),
            parent_counts: HashMap::new(),
            child_m,
            n: d.n_rows() as f64,
            pseudo,
        };
        for i in 0..d.n_rows() {
            let row = d.row(i);
            let code = t.encode_row(row);
            *t.counts.entry(code).or_insert(0.0) += 1.0;
            if t.child_m > 0 {
                *t.parent_counts.entry(code / t.child_m as u64).or_insert(0.0) += 1.0;
            }
        }
        Ok(t)
    }

    pub fn focal_point(&self) -> &FocalPoint {
        &self.fp
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn pseudo(&self) -> f64 {
        self.pseudo
    }

    pub fn domains(&self) -> &[usize] {
        &self.domains
    }

    pub fn is_conditional(&self) -> bool {
        self.child_m > 0
    }

    /// Full product-domain size.
    pub fn cells(&self) -> u64 {
        self.domains.iter().fold(1u64, |a, &m| a * m as u64)
    }

    /// Mixed-radix cell code of a full-width row, first axis most
    /// significant; conditional tables put the child axis last.
    pub fn encode_row(&self, row: &[Cat]) -> u64 {
        let mut code = 0u64;
        match &self.axes {
            Axes::Features(feats) => {
                for (a, &f) in feats.iter().enumerate() {
                    code = code * self.domains[a] as u64 + row[f] as u64;
                }
            }
            Axes::OneHot(cols) => {
                for &(f, c) in cols {
                    code = code * 2 + u64::from(row[f] == c);
                }
            }
        }
        code
    }

    /// Raw (unsmoothed) count of a cell.
    pub fn raw_count(&self, code: u64) -> f64 {
        self.counts.get(&code).copied().unwrap_or(0.0)
    }

    /// Smoothed probability of a cell code: marginal probability, or for
    /// conditional tables P(child | parents) of that cell.
    pub fn prob_cell(&self, code: u64) -> f64 {
        if self.child_m == 0 {
            (self.raw_count(code) + self.pseudo) / (self.n + self.pseudo * self.cells() as f64)
        } else {
            let m = self.child_m as f64;
            let parent_raw = self.parent_counts.get(&(code / self.child_m as u64)).copied().unwrap_or(0.0);
            let den = parent_raw + self.pseudo * m;
            if den == 0.0 {
                1.0 / m
            } else {
                (self.raw_count(code) + self.pseudo) / den
            }
        }
    }

    /// Smoothed probability of a target row's focal-point value.
    pub fn prob_row(&self, row: &[Cat]) -> f64 {
        self.prob_cell(self.encode_row(row))
    }

    /// Raw counts over the full product domain, cell code as index.
    pub fn dense_raw_counts(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cells() as usize];
        for (&code, &c) in &self.counts {
            out[code as usize] = c;
        }
        out
    }

    /// Decode a cell code into per-axis values.
    pub fn decode_cell(&self, mut code: u64) -> Vec<Cat> {
        let mut vals = vec![0 as Cat; self.domains.len()];
        for a in (0..self.domains.len()).rev() {
            let m = self.domains[a] as u64;
            vals[a] = (code % m) as Cat;
            code /= m;
        }
        vals
    }

    pub fn to_json(&self) -> Result<String> {
        let mut cells: Vec<(u64, f64)> = self.counts.iter().map(|(&k, &v)| (k, v)).collect();
        cells.sort_by_key(|&(k, _)| k);
        let repr = TableRepr {
            focal_point: self.fp.clone(),
            onehot: matches!(self.axes, Axes::OneHot(_)),
            n: self.n,
            pseudo: self.pseudo,
            counts: cells.iter().map(|&(k, v)| (self.decode_cell(k), v)).collect(),
        };
        Ok(serde_json::to_string_pretty(&repr)?)
    }

    pub fn from_json(s: &str, schema: &Schema) -> Result<Self> {
        let repr: TableRepr = serde_json::from_str(s).map_err(|e| Error::Data(format!("bad table json: {e}")))?;
        let mut t = table_shell(repr.focal_point, repr.onehot, schema)?;
        t.n = repr.n;
        t.pseudo = repr.pseudo;
        for (vals, c) in &repr.counts {
            if vals.len() != t.domains.len() {
                return Err(Error::Data("cell arity does not match focal point".into()));
            }
            let mut code = 0u64;
            for (a, &v) in vals.iter().enumerate() {
                if (v as usize) >= t.domains[a] {
                    return Err(Error::Data(format!("cell value {v} outside axis domain {}", t.domains[a])));
                }
                code = code * t.domains[a] as u64 + v as u64;
            }
            t.counts.insert(code, *c);
            if t.child_m > 0 {
                *t.parent_counts.entry(code / t.child_m as u64).or_insert(0.0) += *c;
            }
        }
        Ok(t)
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    focal_point: FocalPoint,
    onehot: bool,
    n: f64,
    pseudo: f64,
    counts: Vec<(Vec<Cat>, f64)>,
}

/// Table with shape resolved but no counts; shared by estimators and
/// deserialization.
fn table_shell(fp: FocalPoint, onehot: bool, schema: &Schema) -> Result<ProbabilityTable> {
    let (axes, domains, child_m) = if onehot {
        let map = OneHotMap::new(schema);
        let FocalPoint::Marginal { features } = &fp else {
            return Err(Error::Config("one-hot focal points must be marginals".into()));
        };
        if features.iter().any(|&c| c >= map.width()) {
            return Err(Error::Config("one-hot column outside schema width".into()));
        }
        let cols: Vec<(usize, Cat)> = features.iter().map(|&c| map.decode(c)).collect();
        let domains = vec![2usize; cols.len()];
        (Axes::OneHot(cols), domains, 0)
    } else {
        let vars = fp.vars();
        if vars.iter().any(|&f| f >= schema.len()) {
            return Err(Error::Config("focal point references a feature outside the schema".into()));
        }
        let domains: Vec<usize> = vars.iter().map(|&f| schema.domain(f)).collect();
        let child_m = if fp.is_conditional() { *domains.last().unwrap() } else { 0 };
        (Axes::Features(vars), domains, child_m)
    };
    Ok(ProbabilityTable {
        fp,
        axes,
        domains,
        counts: HashMap::new(),
        parent_counts: HashMap::new(),
        child_m,
        n: 0.0,
        pseudo: 0.0,
    })
}

/// Smoothed marginal table over a feature set.
pub fn estimate_marginal(d: &Dataset, features: &[usize], pseudo: f64) -> Result<ProbabilityTable> {
    let fp = FocalPoint::marginal(features)?;
    let shell = table_shell(fp, false, d.schema())?;
    ProbabilityTable::build(shell.fp, shell.axes, shell.domains, shell.child_m, d, pseudo)
}

/// Smoothed conditional table P(child | parents).
pub fn estimate_conditional(d: &Dataset, child: usize, parents: &[usize], pseudo: f64) -> Result<ProbabilityTable> {
    let fp = FocalPoint::conditional(child, parents)?;
    let shell = table_shell(fp, false, d.schema())?;
    ProbabilityTable::build(shell.fp, shell.axes, shell.domains, shell.child_m, d, pseudo)
}

/// Smoothed marginal table over one-hot binary columns.
pub fn estimate_onehot_marginal(d: &Dataset, cols: &[usize], pseudo: f64) -> Result<ProbabilityTable> {
    let fp = FocalPoint::marginal(cols)?;
    let shell = table_shell(fp, true, d.schema())?;
    ProbabilityTable::build(shell.fp, shell.axes, shell.domains, shell.child_m, d, pseudo)
}

/// Estimate any focal point, dispatching on the space it lives in.
pub fn estimate_focal(d: &Dataset, fp: &FocalPoint, onehot: bool, pseudo: f64) -> Result<ProbabilityTable> {
    let shell = table_shell(fp.clone(), onehot, d.schema())?;
    ProbabilityTable::build(shell.fp, shell.axes, shell.domains, shell.child_m, d, pseudo)
}
