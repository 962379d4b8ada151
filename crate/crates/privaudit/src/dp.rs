//! Differential-privacy primitives: Laplace noise on counts, exponential-
//! mechanism selection, and per-generator budget bookkeeping.
//!
//! Noisy counts are stored raw; clipping to zero and renormalizing happen
//! strictly at post-processing time (when a measurement becomes a sampling
//! distribution), never in the stored measurement itself.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::stats::{FocalPoint, ProbabilityTable};
use crate::{Error, Result};

/// Privacy budget for one generator run, split by labelled fractions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Budget {
    total: f64,
    ledger: Vec<(String, f64)>,
}

impl Budget {
    pub fn new(total_epsilon: f64) -> Result<Self> {
        // Positive, NaN-free; +infinity is allowed as the no-noise limit.
        if !(total_epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon must be positive, got {total_epsilon}")));
        }
        Ok(Budget { total: total_epsilon, ledger: Vec::new() })
    }

    /// Reserve `fraction` of the total budget under a label; returns the
    /// epsilon slice. Overspending (beyond 1 + 1e-12) is rejected.
    pub fn spend(&mut self, label: &str, fraction: f64) -> Result<f64> {
        if !(fraction > 0.0) {
            return Err(Error::Config(format!("budget fraction must be positive, got {fraction}")));
        }
        if self.spent_fraction() + fraction > 1.0 + 1e-12 {
            return Err(Error::Runtime(format!(
                "budget overspend: {} + {fraction} of label {label} exceeds 1",
                self.spent_fraction()
            )));
        }
        self.ledger.push((label.to_string(), fraction));
        Ok(fraction * self.total)
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn spent_fraction(&self) -> f64 {
        self.ledger.iter().map(|(_, f)| f).sum()
    }

    pub fn ledger(&self) -> &[(String, f64)] {
        &self.ledger
    }
}

/// A Laplace-noised count table, pre-clip.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoisyMeasurement {
    pub focal_point: FocalPoint,
    /// Axis domain sizes, child last for conditionals.
    pub domains: Vec<usize>,
    /// Dense noisy counts over the full product domain, mixed-radix cell
    /// code as index (first axis most significant). May be negative.
    pub counts: Vec<f64>,
    pub epsilon: f64,
    pub sensitivity: f64,
}

impl NoisyMeasurement {
    pub fn cells(&self) -> usize {
        self.counts.len()
    }

    /// Post-processing: clip negatives to 0 and normalize to a probability
    /// vector. An all-zero table falls back to uniform.
    pub fn clipped_probs(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.counts.iter().map(|&c| c.max(0.0)).collect();
        let total: f64 = p.iter().sum();
        if total > 0.0 {
            for v in &mut p {
                *v /= total;
            }
        } else {
            let u = 1.0 / p.len() as f64;
            p.fill(u);
        }
        p
    }

    /// Post-processing for conditional measurements: per parent tuple, the
    /// clipped-normalized distribution over the child axis (assumed last).
    /// Parent tuples with no positive mass fall back to uniform.
    pub fn conditional_rows(&self) -> Vec<Vec<f64>> {
        let m = *self.domains.last().expect("measurement has axes");
        let rows = self.counts.len() / m;
        let mut out = Vec::with_capacity(rows);
        for r in 0..rows {
            let mut row: Vec<f64> = self.counts[r * m..(r + 1) * m].iter().map(|&c| c.max(0.0)).collect();
            let total: f64 = row.iter().sum();
            if total > 0.0 {
                for v in &mut row {
                    *v /= total;
                }
            } else {
                row.fill(1.0 / m as f64);
            }
            out.push(row);
        }
        out
    }
}

/// One Laplace draw with the given scale. `scale` 0 (the epsilon to infinity
/// limit) returns exact values while still consuming one uniform draw, so
/// stream positions do not depend on epsilon.
pub fn laplace<R: Rng>(scale: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.gen::<f64>() - 0.5;
    if scale == 0.0 {
        return 0.0;
    }
    let t = (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE);
    -scale * u.signum() * t.ln()
}

/// Laplace mechanism over a table's raw counts: every cell of the full
/// product domain gets i.i.d. Laplace(sensitivity / epsilon) noise.
pub fn laplace_counts<R: Rng>(
    table: &ProbabilityTable,
    epsilon: f64,
    sensitivity: f64,
    rng: &mut R,
) -> Result<NoisyMeasurement> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(sensitivity > 0.0) || !sensitivity.is_finite() {
        return Err(Error::Config(format!("sensitivity must be positive, got {sensitivity}")));
    }
    let scale = if epsilon.is_infinite() { 0.0 } else { sensitivity / epsilon };
    let mut counts = table.dense_raw_counts();
    for c in counts.iter_mut() {
        *c += laplace(scale, rng);
    }
    Ok(NoisyMeasurement {
        focal_point: table.focal_point().clone(),
        domains: table.domains().to_vec(),
        counts,
        epsilon,
        sensitivity,
    })
}

/// Exponential mechanism: returns index i with probability proportional to
/// exp(epsilon * scores[i] / (2 * sensitivity)). Scores are max-shifted
/// before exponentiation for numerical stability.
pub fn exponential_select<R: Rng>(scores: &[f64], epsilon: f64, sensitivity: f64, rng: &mut R) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::Config("exponential_select needs candidates".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(sensitivity > 0.0) || !sensitivity.is_finite() {
        return Err(Error::Config(format!("sensitivity must be positive, got {sensitivity}")));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Config("scores must not be NaN".into()));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = scores
        .iter()
        .map(|&s| {
            let diff = s - max;
            // diff = 0 must map to weight 1 even at epsilon = infinity.
            if diff == 0.0 { 1.0 } else { (epsilon * diff / (2.0 * sensitivity)).exp() }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Ok(i);
        }
    }
    // Float round-off can leave u marginally above the accumulated total;
    // the last positive-weight candidate takes it.
    Ok(weights.iter().rposition(|&w| w > 0.0).unwrap_or(scores.len() - 1))
}
