//! Equal-depth (quantile) discretization for numeric columns.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Binning of one numeric feature: sorted interior cut points. Intervals are
/// right-closed, `(edges[i-1], edges[i]]`, open towards the infinities at the
/// ends. Bin count is `edges.len() + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub feature: String,
    pub edges: Vec<f64>,
    pub bins: usize,
}

impl BinningSpec {
    pub fn new(feature: &str, edges: Vec<f64>) -> Result<Self> {
        if edges.windows(2).any(|w| w[0] >= w[1]) || edges.iter().any(|e| e.is_nan()) {
            return Err(Error::Config(format!("bin edges for {feature} must be strictly increasing")));
        }
        let bins = edges.len() + 1;
        Ok(BinningSpec { feature: feature.to_string(), edges, bins })
    }

    /// Bin index of a value.
    pub fn bin_of(&self, v: f64) -> usize {
        bin_of(v, &self.edges)
    }
}

/// Bin index of `v` for right-closed intervals over `edges`.
pub fn bin_of(v: f64, edges: &[f64]) -> usize {
    edges.partition_point(|&e| e < v)
}

/// Equal-depth binning: edge `i` (for `i = 1..bins`) is the lower empirical
/// quantile at `p = i / bins`, the value at index `ceil(p * n) - 1` of the
/// ascending sort. Duplicate edges collapse, so heavily repeated values can
/// shrink the effective bin count. Returns the spec (feature name left empty
/// for the caller to fill) and each value's bin index.
pub fn equal_depth_bin(values: &[f64], bins: usize) -> Result<(BinningSpec, Vec<usize>)> {
    if bins == 0 {
        return Err(Error::Config("bin count must be positive".into()));
    }
    if values.is_empty() {
        return Err(Error::Data("cannot bin an empty column".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Data("cannot bin NaN values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let mut edges = Vec::with_capacity(bins.saturating_sub(1));
    for i in 1..bins {
        // ceil(i/bins * n) - 1 in exact integer arithmetic
        let idx = (i * n).div_ceil(bins) - 1;
        let e = sorted[idx.min(n - 1)];
        if edges.last().is_none_or(|&last| e > last) {
            edges.push(e);
        }
    }
    // An edge equal to the maximum would leave the last bin empty on the
    // fitting data; it carries no split information.
    while edges.last() == sorted.last() {
        edges.pop();
    }
    let spec = BinningSpec::new("", edges)?;
    let indices = values.iter().map(|&v| spec.bin_of(v)).collect();
    Ok((spec, indices))
}
