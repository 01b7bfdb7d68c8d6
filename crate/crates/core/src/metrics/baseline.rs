use serde::{Deserialize, Serialize};

use crate::data::check_marginals;
use crate::error::{Error, Result};

/// Accuracy of a guesser drawing labels from the outcome marginals:
/// the sum of squared label probabilities.
pub fn random_baseline(marginals: &[f64]) -> Result<f64> {
    check_marginals(marginals, marginals.len())?;
    Ok(marginals.iter().map(|p| p * p).sum())
}

/// Accuracy of always forecasting the most common label.
pub fn majority_baseline(marginals: &[f64]) -> Result<f64> {
    check_marginals(marginals, marginals.len())?;
    Ok(marginals.iter().copied().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub labels: Vec<String>,
    /// Fraction of all rows where both raters chose this label.
    pub per_label: Vec<f64>,
    pub overall: f64,
    pub n: usize,
}

/// How often two raters assign the same label.
pub fn agreement_table(rater_a: &[usize], rater_b: &[usize], labels: &[String]) -> Result<Agreement> {
    if rater_a.len() != rater_b.len() {
        return Err(Error::invalid(format!("raters labeled {} and {} rows", rater_a.len(), rater_b.len())));
    }
    if rater_a.is_empty() {
        return Err(Error::invalid("no rows to compare"));
    }
    let k = labels.len();
    let mut both = vec![0usize; k];
    for (&a, &b) in rater_a.iter().zip(rater_b) {
        if a >= k || b >= k {
            return Err(Error::invalid(format!("label index {} out of range", a.max(b))));
        }
        if a == b {
            both[a] += 1;
        }
    }
    let n = rater_a.len();
    let agreed: usize = both.iter().sum();
    Ok(Agreement {
        labels: labels.to_vec(),
        per_label: both.iter().map(|&c| c as f64 / n as f64).collect(),
        overall: agreed as f64 / n as f64,
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_marginals() {
        let b = random_baseline(&[0.1186, 0.4835, 0.3979]).unwrap();
        assert!((b - 0.406).abs() <= 0.0005, "{b}");
    }

    #[test]
    fn uniform_and_degenerate() {
        for k in 2..7 {
            let m = vec![1.0 / k as f64; k];
            assert!((random_baseline(&m).unwrap() - 1.0 / k as f64).abs() < 1e-12);
        }
        assert_eq!(random_baseline(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(majority_baseline(&[0.2, 0.5, 0.3]).unwrap(), 0.5);
        assert!(random_baseline(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn agreement_extremes() {
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let same = agreement_table(&[0, 1, 2, 1], &[0, 1, 2, 1], &labels).unwrap();
        assert_eq!(same.overall, 1.0);
        assert_eq!(same.per_label, vec![0.25, 0.5, 0.25]);
        let disjoint = agreement_table(&[0, 1, 2], &[1, 2, 0], &labels).unwrap();
        assert_eq!(disjoint.overall, 0.0);
        assert!(agreement_table(&[0], &[0, 1], &labels).is_err());
    }
}
