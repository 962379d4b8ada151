//! 1-D Wasserstein distance between empirical distributions, and the
//! column-wise dataset quality metric built on it.

use crate::data::Dataset;
use crate::{Error, Result};

/// W1 between the empirical distributions of `a` and `b` after min-max
/// normalizing both onto [0, 1] with the supplied range (values outside it
/// are clamped). Computed as the integral of |CDF_a - CDF_b|.
pub fn wasserstein_1d(a: &[f64], b: &[f64], lo: f64, hi: f64) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Data("wasserstein_1d needs non-empty inputs".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) || lo.is_nan() || hi.is_nan() {
        return Err(Error::Data("wasserstein_1d got NaN".into()));
    }
    if hi < lo {
        return Err(Error::Config("range upper bound below lower bound".into()));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let norm = |v: f64| ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
    let mut xs: Vec<f64> = a.iter().copied().map(norm).collect();
    let mut ys: Vec<f64> = b.iter().copied().map(norm).collect();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let (mut ia, mut ib) = (0usize, 0usize);
    let (mut prev, mut total) = (0.0f64, 0.0f64);
    while ia < xs.len() || ib < ys.len() {
        let xa = xs.get(ia).copied().unwrap_or(f64::INFINITY);
        let xb = ys.get(ib).copied().unwrap_or(f64::INFINITY);
        let x = xa.min(xb);
        let fa = ia as f64 / xs.len() as f64;
        let fb = ib as f64 / ys.len() as f64;
        total += (x - prev) * (fa - fb).abs();
        while ia < xs.len() && xs[ia] == x {
            ia += 1;
        }
        while ib < ys.len() && ys[ib] == x {
            ib += 1;
        }
        prev = x;
    }
    Ok(total)
}

/// Sum over columns of the 1-D Wasserstein distance between `synth` and
/// `train`, each column normalized by its domain-index range. Categorical
/// columns use the domain index as the ordinal scale.
pub fn dataset_distance(synth: &Dataset, train: &Dataset) -> Result<f64> {
    if synth.schema() != train.schema() {
        return Err(Error::Data("dataset_distance needs a shared schema".into()));
    }
    let schema = synth.schema();
    let mut total = 0.0;
    for f in 0..schema.len() {
        let m = schema.domain(f);
        if m < 2 {
            continue;
        }
        let a: Vec<f64> = (0..synth.n_rows()).map(|i| synth.value(i, f) as f64).collect();
        let b: Vec<f64> = (0..train.n_rows()).map(|i| train.value(i, f) as f64).collect();
        total += wasserstein_1d(&a, &b, 0.0, (m - 1) as f64)?;
    }
    Ok(total)
}
