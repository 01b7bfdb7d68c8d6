//! Two scored groups with different base rates and calibrated, coarsely
//! binned scores. On such data no threshold pair satisfies calibration and
//! both error rate balances at a small tolerance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use super::outcomes::GroupedOutcomes;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredGroupPlan {
    pub name: String,
    pub rows: usize,
    pub base_rate: f64,
}

/// Number of equal-width score bins.
pub const SCORE_BINS: usize = 10;

/// Default plan: 600 rows at base rate 0.3 and 400 rows at 0.6.
pub fn default_plan() -> Vec<ScoredGroupPlan> {
    vec![
        ScoredGroupPlan { name: "A".into(), rows: 600, base_rate: 0.3 },
        ScoredGroupPlan { name: "B".into(), rows: 400, base_rate: 0.6 },
    ]
}

/// Each row draws `p ~ Beta(2b, 2(1-b))`, snapped to the midpoint of its
/// tenth, then an outcome `~ Bernoulli(p)`. The score is `p`, so scores are
/// calibrated within each group.
pub fn scored_groups(plan: &[ScoredGroupPlan], seed: u64) -> Result<GroupedOutcomes> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups = Vec::with_capacity(plan.len());
    for g in plan {
        if !(g.base_rate > 0.0 && g.base_rate < 1.0) || g.rows == 0 {
            return Err(Error::invalid(format!("group `{}` needs rows and a base rate in (0, 1)", g.name)));
        }
        let beta = Beta::new(2.0 * g.base_rate, 2.0 * (1.0 - g.base_rate)).map_err(|e| Error::invalid(e.to_string()))?;
        let mut scores = Vec::with_capacity(g.rows);
        let mut actual = Vec::with_capacity(g.rows);
        for _ in 0..g.rows {
            let p: f64 = beta.sample(&mut rng);
            let bin = ((p * SCORE_BINS as f64).floor() as usize).min(SCORE_BINS - 1);
            let p = (bin as f64 + 0.5) / SCORE_BINS as f64;
            scores.push(p);
            actual.push(rng.random::<f64>() < p);
        }
        groups.push((g.name.clone(), scores, actual));
    }
    GroupedOutcomes::from_scores(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_binned() {
        let a = scored_groups(&default_plan(), 3).unwrap();
        let b = scored_groups(&default_plan(), 3).unwrap();
        assert_eq!(a, b);
        for (_, g) in a.groups() {
            for s in g.scores.as_ref().unwrap() {
                let scaled = s * 10.0 - 0.5;
                assert!((scaled - scaled.round()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_degenerate_rates() {
        let plan = vec![ScoredGroupPlan { name: "A".into(), rows: 10, base_rate: 1.0 }];
        assert!(scored_groups(&plan, 0).is_err());
    }
}
