use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Predictions, actual outcomes and optional scores for one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupData {
    pub predicted: Vec<usize>,
    pub actual: Vec<usize>,
    /// Higher means more likely positive.
    pub scores: Option<Vec<f64>>,
}

/// Outcomes split by protected group, reduced to positive/negative around
/// one designated label.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedOutcomes {
    labels: Vec<String>,
    positive: usize,
    groups: BTreeMap<String, GroupData>,
}

/// An exact rate `num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rate {
    pub num: u64,
    pub den: u64,
}

impl Rate {
    pub fn value(self) -> Option<f64> {
        (self.den > 0).then(|| self.num as f64 / self.den as f64)
    }

    pub fn complement(self) -> Rate {
        Rate { num: self.den - self.num, den: self.den }
    }

    /// `|a - b|`, computed on integer cross-products so that complementary
    /// rates produce bit-identical gaps.
    pub fn gap(a: Rate, b: Rate) -> Option<f64> {
        if a.den == 0 || b.den == 0 {
            return None;
        }
        let lhs = a.num as i128 * b.den as i128;
        let rhs = b.num as i128 * a.den as i128;
        Some((lhs - rhs).unsigned_abs() as f64 / (a.den as u128 * b.den as u128) as f64)
    }
}

/// Binary confusion counts of one group around the positive label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GroupCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl GroupCounts {
    pub fn from_flags(predicted: impl IntoIterator<Item = bool>, actual: impl IntoIterator<Item = bool>) -> Self {
        let mut c = GroupCounts::default();
        for (p, a) in predicted.into_iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn positive_rate(&self) -> Rate {
        Rate { num: self.tp + self.fp, den: self.tp + self.fp + self.fn_ + self.tn }
    }

    pub fn precision(&self) -> Rate {
        Rate { num: self.tp, den: self.tp + self.fp }
    }

    pub fn sensitivity(&self) -> Rate {
        Rate { num: self.tp, den: self.tp + self.fn_ }
    }

    pub fn specificity(&self) -> Rate {
        Rate { num: self.tn, den: self.tn + self.fp }
    }

    pub fn false_positive_rate(&self) -> Rate {
        self.specificity().complement()
    }

    pub fn false_negative_rate(&self) -> Rate {
        self.sensitivity().complement()
    }

    pub fn base_rate(&self) -> Rate {
        Rate { num: self.tp + self.fn_, den: self.tp + self.fp + self.fn_ + self.tn }
    }
}

impl GroupedOutcomes {
    pub fn new(labels: Vec<String>, positive_label: &str, groups: Vec<(String, GroupData)>) -> Result<Self> {
        let positive = labels
            .iter()
            .position(|l| l == positive_label)
            .ok_or_else(|| Error::invalid(format!("positive label `{positive_label}` is not a label")))?;
        let mut map = BTreeMap::new();
        for (name, data) in groups {
            if data.actual.is_empty() {
                return Err(Error::invalid(format!("group `{name}` is empty")));
            }
            if data.predicted.len() != data.actual.len() {
                return Err(Error::invalid(format!("group `{name}` has mismatched prediction and outcome counts")));
            }
            if data.scores.as_ref().is_some_and(|s| s.len() != data.actual.len() || s.iter().any(|x| x.is_nan())) {
                return Err(Error::invalid(format!("group `{name}` has malformed scores")));
            }
            if data.predicted.iter().chain(&data.actual).any(|&l| l >= labels.len()) {
                return Err(Error::invalid(format!("group `{name}` has a label outside the label set")));
            }
            if map.insert(name.clone(), data).is_some() {
                return Err(Error::invalid(format!("group `{name}` given twice")));
            }
        }
        if map.len() < 2 {
            return Err(Error::invalid("fairness checks need at least two groups"));
        }
        Ok(GroupedOutcomes { labels, positive, groups: map })
    }

    /// Two-label outcomes from boolean predictions and outcomes.
    pub fn from_flags(groups: Vec<(String, Vec<bool>, Vec<bool>)>) -> Result<Self> {
        let to_labels = |v: &[bool]| v.iter().map(|&b| if b { 0 } else { 1 }).collect();
        let groups = groups
            .into_iter()
            .map(|(name, predicted, actual)| {
                (name, GroupData { predicted: to_labels(&predicted), actual: to_labels(&actual), scores: None })
            })
            .collect();
        Self::new(vec!["positive".into(), "negative".into()], "positive", groups)
    }

    /// Scored two-label outcomes; predictions are left empty of meaning
    /// (all negative) until a threshold is applied.
    pub fn from_scores(groups: Vec<(String, Vec<f64>, Vec<bool>)>) -> Result<Self> {
        let groups = groups
            .into_iter()
            .map(|(name, scores, actual)| {
                let actual: Vec<usize> = actual.iter().map(|&b| if b { 0 } else { 1 }).collect();
                let predicted = vec![1; actual.len()];
                (name, GroupData { predicted, actual, scores: Some(scores) })
            })
            .collect();
        Self::new(vec!["positive".into(), "negative".into()], "positive", groups)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn positive_label(&self) -> &str {
        &self.labels[self.positive]
    }

    pub fn positive(&self) -> usize {
        self.positive
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &GroupData)> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    pub fn counts(&self) -> Vec<(&str, GroupCounts)> {
        self.groups()
            .map(|(name, g)| {
                let counts = GroupCounts::from_flags(
                    g.predicted.iter().map(|&p| p == self.positive),
                    g.actual.iter().map(|&a| a == self.positive),
                );
                (name, counts)
            })
            .collect()
    }
}
