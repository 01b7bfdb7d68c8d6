//! Group fairness criteria and the threshold search showing they conflict
//! when base rates differ.

mod criteria;
mod impossibility;
mod outcomes;
mod recipe;
mod report;

pub use criteria::{
    check, check_calibration, check_equalized_odds, check_error_rate_balance, check_statistical_parity,
    verdict_from_counts, Criterion, FairnessVerdict, GroupStatistic, DEFAULT_EPSILON,
};
pub use impossibility::{full_grid, impossibility_search, ImpossibilityReport, PairGaps, ThresholdSearch};
pub use outcomes::{GroupCounts, GroupData, GroupedOutcomes, Rate};
pub use recipe::{default_plan, scored_groups, ScoredGroupPlan, SCORE_BINS};
pub use report::FairnessReport;
