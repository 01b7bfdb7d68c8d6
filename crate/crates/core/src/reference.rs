//! Published confusion matrices of the deployed three-level model and the
//! summary figures printed beside them, for regression checks.

use crate::data::FeatureSchema;
use crate::error::Result;
use crate::metrics::ConfusionMatrix;

pub const OOB_MATRIX_CSV: &str = include_str!("../../../fixtures/published_oob.csv");
pub const VALIDATION_MATRIX_CSV: &str = include_str!("../../../fixtures/published_validation.csv");
pub const SCHEMA_TOML: &str = include_str!("../../../fixtures/schema.toml");

/// Outcome shares (High, Moderate, Low) in the construction sample.
pub const OUTCOME_MARGINALS: [f64; 3] = [0.1186, 0.4835, 0.3979];

/// Printed random-guesser accuracy for [`OUTCOME_MARGINALS`].
pub const RANDOM_BASELINE: f64 = 0.406;

/// Figures printed alongside one matrix, all in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedFigures {
    pub overall_accuracy: f64,
    /// High, Moderate, Low.
    pub sensitivity: [f64; 3],
    pub precision: [f64; 3],
    pub very_dangerous: f64,
    pub very_cautious: f64,
}

pub const OOB_FIGURES: PublishedFigures = PublishedFigures {
    overall_accuracy: 68.50,
    sensitivity: [72.60, 70.20, 65.30],
    precision: [48.50, 70.20, 75.60],
    very_dangerous: 2.40,
    very_cautious: 10.80,
};

pub const VALIDATION_FIGURES: PublishedFigures = PublishedFigures {
    overall_accuracy: 62.80,
    sensitivity: [52.75, 67.28, 60.35],
    precision: [33.83, 63.84, 78.60],
    very_dangerous: 2.38,
    very_cautious: 12.06,
};

/// Printed figures are rounded; recomputed values must land this close
/// (in percent).
pub const FIGURE_TOLERANCE: f64 = 0.15;

pub fn oob_matrix() -> Result<ConfusionMatrix> {
    ConfusionMatrix::read_csv(OOB_MATRIX_CSV.as_bytes())
}

pub fn validation_matrix() -> Result<ConfusionMatrix> {
    ConfusionMatrix::read_csv(VALIDATION_MATRIX_CSV.as_bytes())
}

pub fn schema() -> Result<FeatureSchema> {
    FeatureSchema::from_toml(SCHEMA_TOML)
}
