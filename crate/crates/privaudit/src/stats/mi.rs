//! Plug-in entropy and mutual information in nats.

use std::collections::HashMap;

use crate::data::Dataset;
use crate::{Error, Result};

/// Empirical joint entropy (nats) of a feature tuple. Duplicate features are
/// permitted (the joint concentrates on the diagonal). An empty tuple has
/// entropy 0.
pub fn entropy(d: &Dataset, features: &[usize]) -> Result<f64> {
    let n = d.n_rows();
    if n == 0 {
        return Err(Error::Data("degenerate estimate: empty dataset".into()));
    }
    for &f in features {
        if f >= d.n_features() {
            return Err(Error::Config(format!("feature {f} outside schema")));
        }
    }
    let mut counts: HashMap<u128, u32> = HashMap::new();
    for i in 0..n {
        let row = d.row(i);
        let mut code = 0u128;
        for &f in features {
            code = code * d.schema().domain(f) as u128 + row[f] as u128;
        }
        *counts.entry(code).or_insert(0) += 1;
    }
    let n = n as f64;
    let mut clogc = 0.0;
    for &c in counts.values() {
        let c = c as f64;
        clogc += c * c.ln();
    }
    Ok(n.ln() - clogc / n)
}

/// Pairwise mutual information MI(i, j) in nats. The pair is canonicalized so
/// that MI(i, j) and MI(j, i) run the identical float computation.
/// MI(i, i) equals the entropy of feature i.
pub fn mutual_information(d: &Dataset, i: usize, j: usize) -> Result<f64> {
    let (lo, hi) = (i.min(j), i.max(j));
    mutual_information_joint(d, hi, &[lo])
}

/// MI between a child feature and the joint distribution of a parent tuple:
/// H(child) + H(parents) - H(parents, child). Empty parents give 0.
pub fn mutual_information_joint(d: &Dataset, child: usize, parents: &[usize]) -> Result<f64> {
    let mut ps = parents.to_vec();
    ps.sort_unstable();
    let h_c = entropy(d, &[child])?;
    let h_p = entropy(d, &ps)?;
    let mut joint = ps.clone();
    joint.push(child);
    let h_pc = entropy(d, &joint)?;
    Ok(h_c + h_p - h_pc)
}
