//! Feature schema, dataset loading and validation, synthetic generation,
//! holdout splits and k-anonymity measurement.

mod anonymity;
mod dataset;
mod schema;
mod synthetic;

pub use anonymity::{anonymity_profile, k_anonymity, min_class_size, AnonymityProfile};
pub use dataset::{split_holdout, Dataset, Record};
pub use schema::{FeatureKind, FeatureSchema, FeatureSpec, Sentinel, MISSING_HISTORY_CODE, OTHER};
pub use synthetic::{generate_grouped, generate_synthetic, GroupPlan};
pub(crate) use synthetic::check_marginals;
