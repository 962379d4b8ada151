//! Per-target density scores: the profile-weighted ratio estimate and the
//! generic density-ratio baseline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::gen::GeneratorKind;
use crate::stats::{estimate_focal, estimate_marginal};
use crate::{Error, Result};

use super::profile::FPProfile;

/// One target's attack output. `zeta` is the raw density score; the
/// probability is filled by activation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetScore {
    /// Row index into the targets dataset.
    pub target: usize,
    pub zeta: f64,
    pub probability: Option<f64>,
    /// True for members, when ground truth is known.
    pub label: Option<bool>,
}

fn check_schemas(synth: &Dataset, aux: &Dataset, targets: &Dataset) -> Result<()> {
    if synth.schema() != aux.schema() || aux.schema() != targets.schema() {
        return Err(Error::Data("synth, aux, and targets must share a schema".into()));
    }
    Ok(())
}

/// Profile-weighted density estimate with explicit pseudo-counts:
/// `zeta[t] = sum over focal points of w_F * P_synth(F(t)) / P_aux(F(t))`.
/// Focal points are processed in the profile's fixed order with a
/// deterministic reduction, so parallelism cannot perturb the sums.
pub fn zeta_with(
    synth: &Dataset,
    aux: &Dataset,
    profile: &FPProfile,
    targets: &Dataset,
    synth_pseudo: f64,
    aux_pseudo: f64,
) -> Result<Vec<TargetScore>> {
    check_schemas(synth, aux, targets)?;
    let onehot = profile.kind == GeneratorKind::GsdLike;
    let pairs: Vec<_> = profile.iter().collect();
    let per_fp: Vec<Result<Vec<f64>>> = pairs
        .par_iter()
        .map(|&(fp, w)| {
            let t_synth = estimate_focal(synth, fp, onehot, synth_pseudo)?;
            let t_aux = estimate_focal(aux, fp, onehot, aux_pseudo)?;
            let mut part = Vec::with_capacity(targets.n_rows());
            for t in 0..targets.n_rows() {
                let row = targets.row(t);
                let ps = t_synth.prob_row(row);
                let pa = t_aux.prob_row(row);
                if pa == 0.0 {
                    return Err(Error::Data(format!(
                        "auxiliary probability is zero at {fp} for target {t}; use a positive aux pseudo-count"
                    )));
                }
                // Ratio first: with synth = aux and matched pseudo-counts
                // the ratio is exactly 1, making the weight-sum identity
                // hold bitwise.
                part.push(w as f64 * (ps / pa));
            }
            Ok(part)
        })
        .collect();
    let mut acc = vec![0.0f64; targets.n_rows()];
    for part in per_fp {
        for (a, v) in acc.iter_mut().zip(part?) {
            *a += v;
        }
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(target, zeta)| TargetScore { target, zeta, probability: None, label: None })
        .collect())
}

/// [`zeta_with`] at the default pseudo-counts: 0 on the synthetic tables
/// (scarcity there is signal) and 1 on the auxiliary tables (denominator
/// stays positive).
pub fn zeta(synth: &Dataset, aux: &Dataset, profile: &FPProfile, targets: &Dataset) -> Result<Vec<TargetScore>> {
    zeta_with(synth, aux, profile, targets, 0.0, 1.0)
}

/// Log-aggregated variant: only focal points selected at least `omega`
/// times contribute, each adding `ln(P_synth / P_aux)` with the numerator
/// floored at `1 / (2 * |synth| * cells)` so a zero synthetic probability
/// stays finite. Returns `exp` of the sum.
pub fn zeta_log_with(
    synth: &Dataset,
    aux: &Dataset,
    profile: &FPProfile,
    omega: u32,
    targets: &Dataset,
    synth_pseudo: f64,
    aux_pseudo: f64,
) -> Result<Vec<TargetScore>> {
    check_schemas(synth, aux, targets)?;
    if omega as usize > profile.runs {
        return Err(Error::Config(format!(
            "threshold {omega} exceeds the profile's {} runs",
            profile.runs
        )));
    }
    let onehot = profile.kind == GeneratorKind::GsdLike;
    let pairs: Vec<_> = profile.iter().filter(|&(_, w)| w >= omega).collect();
    let per_fp: Vec<Result<Vec<f64>>> = pairs
        .par_iter()
        .map(|&(fp, _)| {
            let t_synth = estimate_focal(synth, fp, onehot, synth_pseudo)?;
            let t_aux = estimate_focal(aux, fp, onehot, aux_pseudo)?;
            let floor = 1.0 / (2.0 * synth.n_rows() as f64 * t_synth.cells() as f64);
            let mut part = Vec::with_capacity(targets.n_rows());
            for t in 0..targets.n_rows() {
                let row = targets.row(t);
                let ps = t_synth.prob_row(row).max(floor);
                let pa = t_aux.prob_row(row);
                if pa == 0.0 {
                    return Err(Error::Data(format!(
                        "auxiliary probability is zero at {fp} for target {t}; use a positive aux pseudo-count"
                    )));
                }
                part.push((ps / pa).ln());
            }
            Ok(part)
        })
        .collect();
    let mut acc = vec![0.0f64; targets.n_rows()];
    for part in per_fp {
        for (a, v) in acc.iter_mut().zip(part?) {
            *a += v;
        }
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(target, g)| TargetScore { target, zeta: g.exp(), probability: None, label: None })
        .collect())
}

/// [`zeta_log_with`] at the default pseudo-counts (0 synth, 1 aux).
pub fn zeta_log(
    synth: &Dataset,
    aux: &Dataset,
    profile: &FPProfile,
    omega: u32,
    targets: &Dataset,
) -> Result<Vec<TargetScore>> {
    zeta_log_with(synth, aux, profile, omega, targets, 0.0, 1.0)
}

/// Generator-agnostic baseline: the ratio of smoothed independent 1-way
/// densities, `S(synth) / S(aux)` with `S` the product over features of the
/// target value's marginal probability at the given pseudo-count.
pub fn domias_score_with(
    synth: &Dataset,
    aux: &Dataset,
    targets: &Dataset,
    pseudo: f64,
) -> Result<Vec<TargetScore>> {
    check_schemas(synth, aux, targets)?;
    let l = targets.n_features();
    let mut ratios = vec![1.0f64; targets.n_rows()];
    for f in 0..l {
        let t_synth = estimate_marginal(synth, &[f], pseudo)?;
        let t_aux = estimate_marginal(aux, &[f], pseudo)?;
        for t in 0..targets.n_rows() {
            let row = targets.row(t);
            let pa = t_aux.prob_row(row);
            if pa == 0.0 {
                return Err(Error::Data(format!(
                    "auxiliary probability is zero on feature {f} for target {t}; use a positive pseudo-count"
                )));
            }
            ratios[t] *= t_synth.prob_row(row) / pa;
        }
    }
    Ok(ratios
        .into_iter()
        .enumerate()
        .map(|(target, zeta)| TargetScore { target, zeta, probability: None, label: None })
        .collect())
}

/// [`domias_score_with`] at pseudo-count 1 on both datasets.
pub fn domias_score(synth: &Dataset, aux: &Dataset, targets: &Dataset) -> Result<Vec<TargetScore>> {
    domias_score_with(synth, aux, targets, 1.0)
}
