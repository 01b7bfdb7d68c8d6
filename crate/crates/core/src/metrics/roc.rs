//! ROC curves by threshold sweep, and the area beneath them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// Cumulative (false positive, true positive) counts when predicting
/// positive for `score >= t`, for `t` running from `+inf` down through every
/// distinct score. Starts at (0, 0) and ends at (N, P).
fn sweep(scores: &[f64], actual: &[bool]) -> Result<(Vec<(u64, u64)>, u64, u64)> {
    if scores.len() != actual.len() {
        return Err(Error::invalid(format!("{} scores for {} labels", scores.len(), actual.len())));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::invalid("scores must not be NaN"));
    }
    let positives = actual.iter().filter(|&&a| a).count() as u64;
    let negatives = actual.len() as u64 - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::invalid("ROC analysis needs both classes present"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut counts = vec![(0, 0)];
    let (mut fp, mut tp) = (0, 0);
    for (i, &idx) in order.iter().enumerate() {
        if actual[idx] {
            tp += 1;
        } else {
            fp += 1;
        }
        let last_of_score = order.get(i + 1).is_none_or(|&next| scores[next] != scores[idx]);
        if last_of_score {
            counts.push((fp, tp));
        }
    }
    Ok((counts, negatives, positives))
}

/// One point per distinct threshold (every distinct score, plus the
/// sentinels above and below all scores), ordered by false positive rate.
/// Repeated points are collapsed.
pub fn roc_points(scores: &[f64], actual: &[bool]) -> Result<Vec<RocPoint>> {
    let (counts, n, p) = sweep(scores, actual)?;
    let mut points: Vec<RocPoint> = Vec::with_capacity(counts.len());
    for (fp, tp) in counts {
        let point = RocPoint { fpr: fp as f64 / n as f64, tpr: tp as f64 / p as f64 };
        if points.last() != Some(&point) {
            points.push(point);
        }
    }
    Ok(points)
}

/// Trapezoidal area under the ROC curve. Accumulated on integer counts, so
/// it equals the share of (positive, negative) pairs ranked correctly, with
/// ties counted half.
pub fn auc(scores: &[f64], actual: &[bool]) -> Result<f64> {
    let (counts, n, p) = sweep(scores, actual)?;
    let twice_area: u128 = counts
        .windows(2)
        .map(|w| {
            let (fp0, tp0) = w[0];
            let (fp1, tp1) = w[1];
            (fp1 - fp0) as u128 * (tp0 + tp1) as u128
        })
        .sum();
    Ok(twice_area as f64 / (2 * n as u128 * p as u128) as f64)
}

/// Scores and labels for a one-vs-rest ROC around `label`.
pub fn one_vs_rest(label_scores: &[Vec<f64>], actual: &[usize], label: usize) -> Result<(Vec<f64>, Vec<bool>)> {
    if label_scores.len() != actual.len() {
        return Err(Error::invalid("score rows and labels differ in length"));
    }
    let scores = label_scores
        .iter()
        .map(|row| row.get(label).copied().ok_or_else(|| Error::invalid("label outside score row")))
        .collect::<Result<_>>()?;
    Ok((scores, actual.iter().map(|&a| a == label).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let scores = [0.9, 0.8, 0.3, 0.1];
        let actual = [true, true, false, false];
        let points = roc_points(&scores, &actual).unwrap();
        assert!(points.contains(&RocPoint { fpr: 0.0, tpr: 1.0 }));
        assert_eq!(points.first(), Some(&RocPoint { fpr: 0.0, tpr: 0.0 }));
        assert_eq!(points.last(), Some(&RocPoint { fpr: 1.0, tpr: 1.0 }));
        assert_eq!(auc(&scores, &actual).unwrap(), 1.0);
    }

    #[test]
    fn all_scores_equal() {
        let scores = [0.5; 6];
        let actual = [true, false, true, false, false, true];
        let points = roc_points(&scores, &actual).unwrap();
        assert_eq!(points, vec![RocPoint { fpr: 0.0, tpr: 0.0 }, RocPoint { fpr: 1.0, tpr: 1.0 }]);
        assert_eq!(auc(&scores, &actual).unwrap(), 0.5);
    }

    #[test]
    fn reversed_scores() {
        assert_eq!(auc(&[0.1, 0.9], &[true, false]).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
        assert!(auc(&[0.1], &[true, false]).is_err());
        assert!(roc_points(&[f64::NAN, 0.2], &[true, false]).is_err());
    }

    #[test]
    fn one_vs_rest_extracts_column() {
        let scores = vec![vec![0.7, 0.3], vec![0.2, 0.8]];
        let (s, a) = one_vs_rest(&scores, &[0, 1], 1).unwrap();
        assert_eq!(s, vec![0.3, 0.8]);
        assert_eq!(a, vec![false, true]);
    }
}
