//! Searching per-group score thresholds for one that satisfies calibration
//! and error rate balance at once.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::outcomes::{GroupCounts, GroupedOutcomes, Rate};
use crate::error::{Error, Result};

/// Gaps between two groups at one threshold pair. Calibration is `None`
/// when either group has no positive predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairGaps {
    pub threshold_a: f64,
    pub threshold_b: f64,
    pub calibration: Option<f64>,
    pub fpr: f64,
    pub fnr: f64,
}

impl PairGaps {
    fn worst(&self) -> Option<f64> {
        self.calibration.map(|c| c.max(self.fpr).max(self.fnr))
    }

    fn feasible(&self, epsilon: f64) -> bool {
        self.worst().is_some_and(|w| w <= epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityReport {
    pub groups: [String; 2],
    pub base_rates: [f64; 2],
    pub epsilon: f64,
    pub pairs_evaluated: usize,
    pub jointly_feasible: bool,
    /// First feasible pair in grid order.
    pub witness: Option<PairGaps>,
    /// Pair minimising each criterion on its own.
    pub best_calibration: Option<PairGaps>,
    pub best_fpr: PairGaps,
    pub best_fnr: PairGaps,
    /// Pair minimising the largest of the three gaps.
    pub best_joint: Option<PairGaps>,
    pub warnings: Vec<String>,
}

/// Every distinct score, ascending, then `+inf` (nobody positive).
pub fn full_grid(scores: &[f64]) -> Vec<f64> {
    let mut grid: Vec<f64> = scores.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.last() != Some(&f64::INFINITY) {
        grid.push(f64::INFINITY);
    }
    grid
}

/// One group's scores sorted ascending with the count of positives below
/// each index, so counts at any threshold come from a binary search.
struct Ranked {
    scores: Vec<f64>,
    positives_below: Vec<u64>,
}

impl Ranked {
    fn new(scores: &[f64], actual: &[bool]) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let mut positives_below = Vec::with_capacity(order.len() + 1);
        positives_below.push(0);
        let mut acc = 0;
        for &i in &order {
            acc += actual[i] as u64;
            positives_below.push(acc);
        }
        Ranked { scores: order.iter().map(|&i| scores[i]).collect(), positives_below }
    }

    fn counts(&self, threshold: f64) -> GroupCounts {
        let n = self.scores.len();
        let below = self.scores.partition_point(|&s| s < threshold);
        let positives = self.positives_below[n];
        let fn_ = self.positives_below[below];
        let tn = below as u64 - fn_;
        let tp = positives - fn_;
        let fp = (n - below) as u64 - tp;
        GroupCounts { tp, fp, fn_, tn }
    }
}

pub struct ThresholdSearch {
    names: [String; 2],
    ranked: [Ranked; 2],
    base: [Rate; 2],
}

impl ThresholdSearch {
    /// Needs exactly two scored groups, each with both outcomes present.
    pub fn new(outcomes: &GroupedOutcomes) -> Result<Self> {
        if outcomes.n_groups() != 2 {
            return Err(Error::invalid(format!("threshold search needs two groups, got {}", outcomes.n_groups())));
        }
        let positive = outcomes.positive();
        let mut names = Vec::new();
        let mut ranked = Vec::new();
        let mut base = Vec::new();
        for (name, g) in outcomes.groups() {
            let scores = g
                .scores
                .as_ref()
                .ok_or_else(|| Error::invalid(format!("group `{name}` has no scores")))?;
            let actual: Vec<bool> = g.actual.iter().map(|&a| a == positive).collect();
            let p = actual.iter().filter(|&&a| a).count() as u64;
            if p == 0 || p == actual.len() as u64 {
                return Err(Error::invalid(format!("group `{name}` needs both outcomes present")));
            }
            names.push(name.to_string());
            ranked.push(Ranked::new(scores, &actual));
            base.push(Rate { num: p, den: actual.len() as u64 });
        }
        let [a, b] = <[Ranked; 2]>::try_from(ranked).ok().expect("two groups");
        Ok(ThresholdSearch {
            names: [names[0].clone(), names[1].clone()],
            ranked: [a, b],
            base: [base[0], base[1]],
        })
    }

    pub fn evaluate(&self, threshold_a: f64, threshold_b: f64) -> PairGaps {
        let a = self.ranked[0].counts(threshold_a);
        let b = self.ranked[1].counts(threshold_b);
        PairGaps {
            threshold_a,
            threshold_b,
            calibration: Rate::gap(a.precision(), b.precision()),
            fpr: Rate::gap(a.false_positive_rate(), b.false_positive_rate()).expect("negatives present"),
            fnr: Rate::gap(a.false_negative_rate(), b.false_negative_rate()).expect("positives present"),
        }
    }

    pub fn grids(&self) -> [Vec<f64>; 2] {
        [full_grid(&self.ranked[0].scores), full_grid(&self.ranked[1].scores)]
    }

    /// Evaluate every pair in `grids` (or the full grids). Each grid must
    /// contain every distinct score of its group.
    pub fn search(&self, epsilon: f64, grids: Option<[Vec<f64>; 2]>) -> Result<ImpossibilityReport> {
        if !(epsilon >= 0.0) {
            return Err(Error::invalid(format!("epsilon {epsilon} must be nonnegative")));
        }
        let grids = match grids {
            Some(g) => {
                for (grid, r) in g.iter().zip(&self.ranked) {
                    if r.scores.iter().any(|s| !grid.contains(s)) {
                        return Err(Error::invalid("threshold grid misses a score value"));
                    }
                }
                g
            }
            None => self.grids(),
        };

        let better = |a: &(usize, f64), b: &(usize, f64)| a.1 < b.1 || (a.1 == b.1 && a.0 < b.0);
        let pick = |best: Option<(usize, f64)>, cand: Option<(usize, f64)>| match (best, cand) {
            (Some(x), Some(y)) => Some(if better(&y, &x) { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        };

        #[derive(Clone, Copy, Default)]
        struct Best {
            witness: Option<usize>,
            calibration: Option<(usize, f64)>,
            fpr: Option<(usize, f64)>,
            fnr: Option<(usize, f64)>,
            joint: Option<(usize, f64)>,
        }
        let width = grids[1].len();
        let merge = |x: Best, y: Best| Best {
            witness: match (x.witness, y.witness) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
            calibration: pick(x.calibration, y.calibration),
            fpr: pick(x.fpr, y.fpr),
            fnr: pick(x.fnr, y.fnr),
            joint: pick(x.joint, y.joint),
        };
        let best = grids[0]
            .par_iter()
            .enumerate()
            .map(|(i, &ta)| {
                let mut best = Best::default();
                for (j, &tb) in grids[1].iter().enumerate() {
                    let k = i * width + j;
                    let g = self.evaluate(ta, tb);
                    if best.witness.is_none() && g.feasible(epsilon) {
                        best.witness = Some(k);
                    }
                    best.calibration = pick(best.calibration, g.calibration.map(|c| (k, c)));
                    best.fpr = pick(best.fpr, Some((k, g.fpr)));
                    best.fnr = pick(best.fnr, Some((k, g.fnr)));
                    best.joint = pick(best.joint, g.worst().map(|w| (k, w)));
                }
                best
            })
            .reduce(Best::default, merge);

        let at = |k: usize| self.evaluate(grids[0][k / width], grids[1][k % width]);
        let mut warnings = Vec::new();
        if Rate::gap(self.base[0], self.base[1]) == Some(0.0) {
            warnings.push("base rates are equal; the criteria are not in conflict".to_string());
        }
        Ok(ImpossibilityReport {
            groups: self.names.clone(),
            base_rates: [self.base[0].value().unwrap(), self.base[1].value().unwrap()],
            epsilon,
            pairs_evaluated: grids[0].len() * width,
            jointly_feasible: best.witness.is_some(),
            witness: best.witness.map(at),
            best_calibration: best.calibration.map(|(k, _)| at(k)),
            best_fpr: at(best.fpr.expect("nonempty grid").0),
            best_fnr: at(best.fnr.expect("nonempty grid").0),
            best_joint: best.joint.map(|(k, _)| at(k)),
            warnings,
        })
    }
}

/// Search every threshold pair of two scored groups for one meeting
/// calibration, equal false positive rates and equal false negative rates
/// within `epsilon`.
pub fn impossibility_search(outcomes: &GroupedOutcomes, epsilon: f64) -> Result<ImpossibilityReport> {
    ThresholdSearch::new(outcomes)?.search(epsilon, None)
}
