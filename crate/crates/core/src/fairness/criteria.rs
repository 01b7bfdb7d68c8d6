use std::fmt;

use serde::{Deserialize, Serialize};

use super::outcomes::{GroupCounts, GroupedOutcomes, Rate};

/// Default tolerance on group gaps.
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    StatisticalParity,
    Calibration,
    EqualizedOdds,
    ErrorRateBalance,
}

impl Criterion {
    pub const ALL: [Criterion; 4] =
        [Criterion::StatisticalParity, Criterion::Calibration, Criterion::EqualizedOdds, Criterion::ErrorRateBalance];

    pub fn statistic_names(self) -> &'static [&'static str] {
        match self {
            Criterion::StatisticalParity => &["positive rate"],
            Criterion::Calibration => &["precision"],
            Criterion::EqualizedOdds => &["sensitivity", "specificity"],
            Criterion::ErrorRateBalance => &["false positive rate", "false negative rate"],
        }
    }

    fn rates(self, c: &GroupCounts) -> Vec<Rate> {
        match self {
            Criterion::StatisticalParity => vec![c.positive_rate()],
            Criterion::Calibration => vec![c.precision()],
            Criterion::EqualizedOdds => vec![c.sensitivity(), c.specificity()],
            Criterion::ErrorRateBalance => vec![c.false_positive_rate(), c.false_negative_rate()],
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Criterion::StatisticalParity => "statistical parity",
            Criterion::Calibration => "calibration (equal precision)",
            Criterion::EqualizedOdds => "equalized odds",
            Criterion::ErrorRateBalance => "error rate balance",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStatistic {
    pub group: String,
    /// One value per statistic of the criterion; `None` when undefined.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessVerdict {
    pub criterion: Criterion,
    pub statistics: Vec<String>,
    pub groups: Vec<GroupStatistic>,
    /// Largest pairwise absolute difference over every statistic, among the
    /// groups where it is defined. `None` if no pair is comparable.
    pub max_gap: Option<f64>,
    pub epsilon: f64,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Evaluate `criterion` from per-group binary counts.
pub fn verdict_from_counts(criterion: Criterion, counts: &[(&str, GroupCounts)], epsilon: f64) -> FairnessVerdict {
    let names = criterion.statistic_names();
    let rates: Vec<Vec<Rate>> = counts.iter().map(|(_, c)| criterion.rates(c)).collect();

    let mut notes = Vec::new();
    for ((group, _), group_rates) in counts.iter().zip(&rates) {
        for (name, rate) in names.iter().zip(group_rates) {
            if rate.den == 0 {
                notes.push(format!("{name} undefined for group `{group}` (zero denominator)"));
            }
        }
    }

    let mut max_gap: Option<f64> = None;
    for s in 0..names.len() {
        for i in 0..rates.len() {
            for j in i + 1..rates.len() {
                if let Some(gap) = Rate::gap(rates[i][s], rates[j][s]) {
                    max_gap = Some(max_gap.map_or(gap, |m: f64| m.max(gap)));
                }
            }
        }
    }

    let pass = notes.is_empty() && max_gap.is_some_and(|g| g <= epsilon);
    FairnessVerdict {
        criterion,
        statistics: names.iter().map(|s| s.to_string()).collect(),
        groups: counts
            .iter()
            .zip(&rates)
            .map(|((group, _), r)| GroupStatistic {
                group: group.to_string(),
                values: r.iter().map(|rate| rate.value()).collect(),
            })
            .collect(),
        max_gap,
        epsilon,
        pass,
        notes,
    }
}

pub fn check(criterion: Criterion, outcomes: &GroupedOutcomes, epsilon: f64) -> FairnessVerdict {
    verdict_from_counts(criterion, &outcomes.counts(), epsilon)
}

/// Equal share of positive predictions across groups.
pub fn check_statistical_parity(outcomes: &GroupedOutcomes, epsilon: f64) -> FairnessVerdict {
    check(Criterion::StatisticalParity, outcomes, epsilon)
}

/// Equal precision on the positive label across groups.
pub fn check_calibration(outcomes: &GroupedOutcomes, epsilon: f64) -> FairnessVerdict {
    check(Criterion::Calibration, outcomes, epsilon)
}

/// Equal sensitivity and equal specificity across groups.
pub fn check_equalized_odds(outcomes: &GroupedOutcomes, epsilon: f64) -> FairnessVerdict {
    check(Criterion::EqualizedOdds, outcomes, epsilon)
}

/// Equal false positive and false negative rates across groups.
pub fn check_error_rate_balance(outcomes: &GroupedOutcomes, epsilon: f64) -> FairnessVerdict {
    check(Criterion::ErrorRateBalance, outcomes, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(a: (Vec<bool>, Vec<bool>), b: (Vec<bool>, Vec<bool>)) -> GroupedOutcomes {
        GroupedOutcomes::from_flags(vec![("A".into(), a.0, a.1), ("B".into(), b.0, b.1)]).unwrap()
    }

    #[test]
    fn identical_groups_pass_everything_at_zero() {
        let g = (vec![true, false, true, false], vec![true, true, false, false]);
        let outcomes = two(g.clone(), g);
        for c in Criterion::ALL {
            let v = check(c, &outcomes, 0.0);
            assert!(v.pass, "{c}: {v:?}");
            assert_eq!(v.max_gap, Some(0.0));
        }
    }

    #[test]
    fn parity_extremes() {
        let outcomes = two((vec![true; 3], vec![true, false, true]), (vec![false; 3], vec![true, false, true]));
        let v = check_statistical_parity(&outcomes, 0.99);
        assert_eq!(v.max_gap, Some(1.0));
        assert!(!v.pass);
        assert!(check_statistical_parity(&outcomes, 1.0).pass);
    }

    #[test]
    fn calibration_extremes() {
        let outcomes = two((vec![true, true], vec![true, true]), (vec![true, true], vec![false, false]));
        let v = check_calibration(&outcomes, 0.5);
        assert_eq!(v.max_gap, Some(1.0));
        assert_eq!(v.groups[0].values, vec![Some(1.0)]);
        assert_eq!(v.groups[1].values, vec![Some(0.0)]);
    }

    #[test]
    fn calibration_undefined_fails() {
        let outcomes = two((vec![false, false], vec![true, false]), (vec![false, false], vec![true, false]));
        let v = check_calibration(&outcomes, 1.0);
        assert!(!v.pass);
        assert_eq!(v.max_gap, None);
        assert_eq!(v.notes.len(), 2);
    }

    #[test]
    fn equalized_odds_needs_both_statistics() {
        // Sensitivity 1/2 in both; specificity 9/10 vs 5/10.
        let mut a_pred = vec![true, false];
        let mut a_act = vec![true, true];
        a_pred.extend([true].iter().chain(&[false; 9]));
        a_act.extend([false; 10]);
        let mut b_pred = vec![true, false];
        let mut b_act = vec![true, true];
        b_pred.extend([true; 5].iter().chain(&[false; 5]));
        b_act.extend([false; 10]);
        let outcomes = two((a_pred, a_act), (b_pred, b_act));
        let v = check_equalized_odds(&outcomes, 0.1);
        assert_eq!(v.groups[0].values[0], v.groups[1].values[0]);
        assert!((v.max_gap.unwrap() - 0.4).abs() < 1e-12);
        assert!(!v.pass);
    }

    #[test]
    fn missing_class_is_undefined() {
        let outcomes = two((vec![true, false], vec![true, true]), (vec![true, false], vec![true, false]));
        let v = check_equalized_odds(&outcomes, 1.0);
        assert!(!v.pass);
        assert!(v.notes[0].contains("specificity"), "{:?}", v.notes);
        assert_eq!(check_error_rate_balance(&outcomes, 1.0).pass, v.pass);
    }
}
