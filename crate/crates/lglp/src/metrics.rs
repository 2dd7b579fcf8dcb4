//! Ranking metrics: area under the ROC curve (Mann–Whitney form, average
//! ranks for ties) and average precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Evaluation summary for one scored pair set.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EvalResult {
    pub auc: f64,
    pub ap: f64,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// AUC as the Mann–Whitney statistic `(#[pos > neg] + ½ #ties) / (n_pos · n_neg)`,
/// computed from a single sort with average ranks for tied scores.
pub fn auc(pos_scores: &[f64], neg_scores: &[f64]) -> Result<f64> {
    if pos_scores.is_empty() || neg_scores.is_empty() {
        return Err(Error::EmptyRankingSide {
            n_pos: pos_scores.len(),
            n_neg: neg_scores.len(),
        });
    }
    if pos_scores.iter().chain(neg_scores).any(|s| s.is_nan()) {
        return Err(Error::NonFinite("auc scores"));
    }
    let np = pos_scores.len();
    let nn = neg_scores.len();
    let mut all: Vec<(f64, bool)> = pos_scores
        .iter()
        .map(|&s| (s, true))
        .chain(neg_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Rank sum of the positives with average ranks over tie groups. Ranks are
    // half-integers, so the sums below are exact in f64.
    let mut pos_rank_sum = 0.0f64;
    let mut i = 0;
    let n = all.len();
    while i < n {
        let mut j = i + 1;
        while j < n && all[j].0 == all[i].0 {
            j += 1;
        }
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = all[i..j].iter().filter(|e| e.1).count();
        pos_rank_sum += avg_rank * pos_in_group as f64;
        i = j;
    }

    // Twice the U statistic is an exact integer.
    let u2 = 2.0 * pos_rank_sum - (np * (np + 1)) as f64;
    let denom2 = (2 * np * nn) as f64;
    // Divide the smaller tail so that auc(pos, neg) + auc(neg, pos) == 1.0
    // holds exactly in floating point.
    let u2c = denom2 - u2;
    if u2 <= u2c {
        Ok(u2 / denom2)
    } else {
        Ok(1.0 - u2c / denom2)
    }
}

/// Average precision over the score-descending ranking:
/// `Σ_k precision@k · Δrecall`. Tied scores keep their input order (the
/// caller's canonical pair order), making results reproducible.
pub fn average_precision(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch {
            op: "average_precision",
            lhs: format!("{} scores", scores.len()),
            rhs: format!("{} labels", labels.len()),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("average_precision scores"));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    if n_pos == 0 {
        return Err(Error::NoPositives);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut hits = 0usize;
    let mut ap = 0.0;
    for (k, &idx) in order.iter().enumerate() {
        if labels[idx] == 1 {
            hits += 1;
            ap += hits as f64 / (k + 1) as f64;
        }
    }
    Ok(ap / n_pos as f64)
}

/// Computes both metrics from per-class score lists. For AP, samples are
/// ranked over the concatenation `[positives..., negatives...]`, so ties
/// resolve in that stable order.
pub fn evaluate(pos_scores: &[f64], neg_scores: &[f64]) -> Result<EvalResult> {
    let auc = auc(pos_scores, neg_scores)?;
    let scores: Vec<f64> = pos_scores.iter().chain(neg_scores).copied().collect();
    let labels: Vec<u8> = std::iter::repeat_n(1u8, pos_scores.len())
        .chain(std::iter::repeat_n(0u8, neg_scores.len()))
        .collect();
    let ap = average_precision(&scores, &labels)?;
    Ok(EvalResult {
        auc,
        ap,
        n_pos: pos_scores.len(),
        n_neg: neg_scores.len(),
    })
}
