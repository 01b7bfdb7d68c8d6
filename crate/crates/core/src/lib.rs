//! Cost-sensitive random forest for ordinal risk labels, with the audit
//! tooling around it: confusion-matrix metrics, ROC/AUC, k-anonymity and
//! group fairness checks.

pub mod data;
pub mod error;
pub mod fairness;
pub mod forest;
pub mod metrics;
pub mod reference;
pub mod tree;

pub use data::{Dataset, FeatureKind, FeatureSchema, FeatureSpec, Record, Sentinel};
pub use error::{Error, Result};
pub use fairness::{FairnessReport, FairnessVerdict, GroupedOutcomes, ImpossibilityReport};
pub use forest::{train_forest, Forest, ForestConfig, Vote};
pub use metrics::{derive_metrics, ConfusionMatrix, MetricReport};
pub use tree::{train_tree, Tree, TreeParams};
