//! Turning raw density scores into membership probabilities.

use std::collections::{BTreeMap, HashMap};

use crate::{Error, Result};

use super::score::TargetScore;

fn check_shape(c: f64, mf: f64) -> Result<()> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Config(format!("sharpness must be positive and finite, got {c}")));
    }
    if !(mf > 0.0 && mf < 1.0) {
        return Err(Error::Config(format!("member fraction must lie strictly in (0, 1), got {mf}")));
    }
    Ok(())
}

/// Calibrated sigmoid over log scores. The midpoint `m` is the empirical
/// lower quantile of `ln(zeta)` that leaves a `mf` fraction of targets
/// above it, so with `mf = 0.5` the median score maps to probability 0.5
/// exactly. Each target then gets `1 / (1 + exp(-c (ln(zeta) - m)))`, with
/// a score of zero mapping to probability 0.
pub fn activate(scores: &mut [TargetScore], c: f64, mf: f64) -> Result<()> {
    check_shape(c, mf)?;
    let n = scores.len();
    if n == 0 {
        return Err(Error::Data("cannot activate an empty score list".into()));
    }
    for s in scores.iter() {
        if s.zeta.is_nan() || s.zeta < 0.0 {
            return Err(Error::Data(format!("score for target {} is not a valid density", s.target)));
        }
    }
    let mut logs: Vec<f64> = scores.iter().map(|s| s.zeta.ln()).collect();
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // ceil((1 - mf) * n) - 1, with the product nudged so values that are
    // integers up to float error land on the intended index.
    let k = (mf * n as f64 + 1e-9).floor() as usize;
    let m = logs[n - k - 1];
    for s in scores.iter_mut() {
        let lz = s.zeta.ln();
        let p = if lz == m { 0.5 } else { 1.0 / (1.0 + (-c * (lz - m)).exp()) };
        s.probability = Some(p);
    }
    Ok(())
}

/// Fallback when the score distribution is unavailable (for example a
/// single target): `min(zeta^(1/c) / 2, 1)`. A score of 1 maps to 0.5 for
/// every sharpness, larger scores saturate at 1.
pub fn activate_unknown(zeta: f64, c: f64) -> Result<f64> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::Config(format!("sharpness must be at least 1 and finite, got {c}")));
    }
    if zeta.is_nan() || zeta < 0.0 {
        return Err(Error::Data(format!("score {zeta} is not a valid density")));
    }
    Ok((zeta.powf(1.0 / c) / 2.0).min(1.0))
}

/// Set-level membership: the mean of the member records' probabilities,
/// one output per set id. `sets` maps a set id to the target indices (the
/// `target` field of the scores) composing it.
pub fn set_mi(scores: &[TargetScore], sets: &BTreeMap<u64, Vec<usize>>) -> Result<Vec<(u64, f64)>> {
    let by_target: HashMap<usize, f64> = scores
        .iter()
        .map(|s| {
            s.probability
                .map(|p| (s.target, p))
                .ok_or_else(|| Error::Data(format!("target {} has no probability; activate first", s.target)))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(sets.len());
    for (&id, members) in sets {
        if members.is_empty() {
            return Err(Error::Data(format!("set {id} has no members")));
        }
        let mut sum = 0.0;
        for &t in members {
            sum += by_target
                .get(&t)
                .ok_or_else(|| Error::Data(format!("set {id} references unscored target {t}")))?;
        }
        out.push((id, sum / members.len() as f64));
    }
    Ok(out)
}
