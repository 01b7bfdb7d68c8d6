//! Bootstrap-aggregated forests with plurality voting, out-of-bag
//! estimation and cost-ratio calibration.

mod calibrate;
mod text;
mod train;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::tree::{Tree, TreeParams};

pub use calibrate::{calibrate_cost_ratio, Calibration, GridPoint, COST_GRID};
pub use text::FOREST_FORMAT_VERSION;
pub use train::{train_forest, train_forest_with_threads};

/// How each tree's training rows are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// `bootstrap_size` draws with replacement.
    Bootstrap,
    /// Every training row exactly once. Makes a one-tree forest equivalent to
    /// a single tree; mainly useful for testing.
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Per-label multiplicative weights, in label order.
    pub class_weights: Vec<f64>,
    pub tree: TreeParams,
    pub master_seed: u64,
    /// Draws per bootstrap; `None` means the training-set size.
    pub bootstrap_size: Option<usize>,
    pub sampling: Sampling,
}

pub const DEFAULT_TREES: usize = 509;

impl ForestConfig {
    pub fn new(n_labels: usize, master_seed: u64) -> Self {
        ForestConfig {
            n_trees: DEFAULT_TREES,
            class_weights: vec![1.0; n_labels],
            tree: TreeParams::default(),
            master_seed,
            bootstrap_size: None,
            sampling: Sampling::Bootstrap,
        }
    }

    pub fn with_trees(mut self, n_trees: usize) -> Self {
        self.n_trees = n_trees;
        self
    }

    pub fn with_class_weights(mut self, weights: Vec<f64>) -> Self {
        self.class_weights = weights;
        self
    }

    pub fn validate(&self, n_labels: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("a forest needs at least one tree"));
        }
        if self.class_weights.len() != n_labels {
            return Err(Error::invalid(format!(
                "{} class weights for {n_labels} labels",
                self.class_weights.len()
            )));
        }
        if self.class_weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::invalid("class weights must be positive and finite"));
        }
        if self.bootstrap_size == Some(0) {
            return Err(Error::invalid("bootstrap size must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of a plurality vote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vote {
    pub label: usize,
    /// Votes per label; sums to the number of voting trees.
    pub tally: Vec<usize>,
}

impl Vote {
    /// Tally the votes. Ties go to the earliest (highest-risk) label.
    pub fn from_tally(tally: Vec<usize>) -> Self {
        let mut label = 0;
        for (i, &count) in tally.iter().enumerate() {
            if count > tally[label] {
                label = i;
            }
        }
        Vote { label, tally }
    }

    pub fn total(&self) -> usize {
        self.tally.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    config: ForestConfig,
    trees: Vec<Tree>,
    /// Sorted bootstrap draws (training row indices) per tree.
    inbag: Vec<Vec<u32>>,
    labels: Vec<String>,
    n_features: usize,
    schema_fingerprint: String,
    data_fingerprint: String,
    n_train_rows: usize,
}

impl Forest {
    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn inbag(&self, tree: usize) -> &[u32] {
        &self.inbag[tree]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn schema_fingerprint(&self) -> &str {
        &self.schema_fingerprint
    }

    pub fn data_fingerprint(&self) -> &str {
        &self.data_fingerprint
    }

    pub fn n_train_rows(&self) -> usize {
        self.n_train_rows
    }

    pub fn check_schema(&self, data: &Dataset) -> Result<()> {
        let found = data.schema().fingerprint();
        if found != self.schema_fingerprint {
            return Err(Error::FingerprintMismatch {
                what: "schema",
                expected: self.schema_fingerprint.clone(),
                found,
            });
        }
        Ok(())
    }

    /// Plurality vote of all trees for one schema-conforming row.
    pub fn vote(&self, row: &[f64]) -> Vote {
        assert_eq!(row.len(), self.n_features, "row width does not match the forest");
        let mut tally = vec![0; self.labels.len()];
        for tree in &self.trees {
            tally[tree.vote(row)] += 1;
        }
        Vote::from_tally(tally)
    }

    /// Votes for every row of `data`, after checking its schema fingerprint.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<Vote>> {
        self.check_schema(data)?;
        Ok((0..data.n_rows()).into_par_iter().map(|i| self.vote(data.row(i))).collect())
    }

    /// Per-row vote of the trees whose bootstrap excluded that row; `None`
    /// when every tree saw the row. `data` must be the training set.
    pub fn oob_predict(&self, data: &Dataset) -> Result<Vec<Option<Vote>>> {
        let found = data.fingerprint();
        if found != self.data_fingerprint {
            return Err(Error::FingerprintMismatch {
                what: "training data",
                expected: self.data_fingerprint.clone(),
                found,
            });
        }
        let n = data.n_rows();
        let in_bag: Vec<Vec<bool>> = self
            .inbag
            .iter()
            .map(|draws| {
                let mut seen = vec![false; n];
                for &r in draws {
                    seen[r as usize] = true;
                }
                seen
            })
            .collect();
        Ok((0..n)
            .into_par_iter()
            .map(|i| {
                let row = data.row(i);
                let mut tally = vec![0; self.labels.len()];
                let mut voters = 0;
                for (tree, seen) in self.trees.iter().zip(&in_bag) {
                    if !seen[i] {
                        tally[tree.vote(row)] += 1;
                        voters += 1;
                    }
                }
                (voters > 0).then(|| Vote::from_tally(tally))
            })
            .collect())
    }

    /// Number of distinct training rows each tree left out of its bootstrap.
    pub fn oob_counts(&self) -> Vec<usize> {
        self.inbag
            .iter()
            .map(|draws| {
                let mut distinct = draws.clone();
                distinct.dedup();
                self.n_train_rows - distinct.len()
            })
            .collect()
    }
}

/// Plurality label and tally of `forest` for `row`.
pub fn predict_forest(forest: &Forest, row: &[f64]) -> Vote {
    forest.vote(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plurality_and_tie_breaks() {
        // High, Low, Low
        let vote = Vote::from_tally(vec![1, 0, 2]);
        assert_eq!(vote.label, 2);
        // High, High, Low, Low
        assert_eq!(Vote::from_tally(vec![2, 0, 2]).label, 0);
        assert_eq!(Vote::from_tally(vec![0, 3, 3]).label, 1);
        assert_eq!(Vote::from_tally(vec![0, 3, 3]).total(), 6);
    }

    #[test]
    fn config_validation() {
        let config = ForestConfig::new(3, 1);
        assert_eq!(config.n_trees, 509);
        assert!(config.validate(3).is_ok());
        assert!(config.validate(2).is_err());
        assert!(config.clone().with_trees(0).validate(3).is_err());
        assert!(config.clone().with_class_weights(vec![1.0, -1.0, 1.0]).validate(3).is_err());
        let zero = ForestConfig { bootstrap_size: Some(0), ..config };
        assert!(zero.validate(3).is_err());
    }
}
