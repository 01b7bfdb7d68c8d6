//! Confusion matrices and the accuracy measures derived from them: per-label
//! one-vs-rest rates, extreme-error rates, ROC/AUC, random-guesser
//! baseline and rater agreement.

mod baseline;
mod confusion;
mod report;
mod roc;

pub use baseline::{agreement_table, majority_baseline, random_baseline, Agreement};
pub use confusion::{ratio, BinaryCounts, ConfusionMatrix};
pub use report::{derive_metrics, fmt_rate, LabelMetrics, MetricReport, RiskErrors};
pub use roc::{auc, one_vs_rest, roc_points, RocPoint};
