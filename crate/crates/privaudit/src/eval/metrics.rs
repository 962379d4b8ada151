//! Rank and threshold metrics over membership predictions.

use crate::{Error, Result};

fn class_counts(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::Data(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Data("scores contain NaN".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::Data("both classes must be present".into()));
    }
    Ok((pos, neg))
}

/// Mann-Whitney rank statistic: the probability that a random member
/// outranks a random non-member, with tied pairs counting one half. The
/// complement is taken before dividing when the statistic exceeds half, so
/// `auc(s) + auc(-s)` is exactly 1 in floating point, not just nearly.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    // Average 1-based ranks within tie groups give the 0.5-per-tied-pair
    // convention; every partial sum here is a multiple of 0.5, hence exact.
    let mut rank_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            if labels[k] {
                rank_sum += avg_rank;
            }
        }
        i = j;
    }
    let p = pos as f64;
    let u = rank_sum - p * (p + 1.0) / 2.0;
    let d = (pos * neg) as f64;
    Ok(if 2.0 * u > d { 1.0 - (d - u) / d } else { u / d })
}

/// Weighted accuracy advantage `(tpr - fpr + 1) / 2` where each prediction
/// (member iff p > 0.5) carries weight `2 |0.5 - p|`. A class whose total
/// weight is zero contributes rate 0, so all-abstaining predictions score
/// exactly 0.5.
pub fn membership_advantage(probabilities: &[f64], labels: &[bool]) -> Result<f64> {
    if probabilities.len() != labels.len() {
        return Err(Error::Data(format!(
            "{} probabilities but {} labels",
            probabilities.len(),
            labels.len()
        )));
    }
    if probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Data("probabilities must lie in [0, 1]".into()));
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::Data("both classes must be present".into()));
    }
    let (mut w_pos, mut w_tp, mut w_neg, mut w_fp) = (0.0, 0.0, 0.0, 0.0);
    for (&p, &l) in probabilities.iter().zip(labels) {
        let w = 2.0 * (0.5 - p).abs();
        let predicted_member = p > 0.5;
        if l {
            w_pos += w;
            if predicted_member {
                w_tp += w;
            }
        } else {
            w_neg += w;
            if predicted_member {
                w_fp += w;
            }
        }
    }
    let tpr = if w_pos > 0.0 { w_tp / w_pos } else { 0.0 };
    let fpr = if w_neg > 0.0 { w_fp / w_neg } else { 0.0 };
    Ok((tpr - fpr + 1.0) / 2.0)
}

/// Threshold sweep over the distinct scores, descending, predicting member
/// at or above each threshold. Starts at (0, 0) and ends at (1, 1); tie
/// groups advance both rates at once, so ties trace diagonal segments.
pub fn roc(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>> {
    let (pos, neg) = class_counts(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());
    let mut curve = Vec::with_capacity(scores.len() + 1);
    curve.push((0.0, 0.0));
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        for &k in &order[i..j] {
            if labels[k] {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        curve.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
        i = j;
    }
    Ok(curve)
}

/// Trapezoid area under an ROC curve; agrees with [`auc`] to 1e-9.
pub fn roc_area(curve: &[(f64, f64)]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}
