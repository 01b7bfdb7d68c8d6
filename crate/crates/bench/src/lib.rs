//! Shared fixtures for the benchmarks.

use riskforest_core::data::generate_synthetic;
use riskforest_core::{reference, Dataset, FeatureSchema};

/// Seeded synthetic data under the bundled schema.
pub fn synthetic(rows: usize, seed: u64) -> Dataset {
    let schema = FeatureSchema::hart();
    generate_synthetic(&schema, rows, &reference::OUTCOME_MARGINALS, 0.8, seed).expect("valid generator inputs")
}
