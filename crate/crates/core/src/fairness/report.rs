use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::criteria::{check, Criterion, FairnessVerdict};
use super::impossibility::{ImpossibilityReport, PairGaps};
use super::outcomes::GroupedOutcomes;
use crate::metrics::fmt_rate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub positive_label: String,
    pub epsilon: f64,
    pub verdicts: Vec<FairnessVerdict>,
    pub impossibility: Option<ImpossibilityReport>,
    pub notes: Vec<String>,
}

impl FairnessReport {
    /// All four criteria on the forecasts in `outcomes`.
    pub fn evaluate(outcomes: &GroupedOutcomes, epsilon: f64) -> Self {
        FairnessReport {
            positive_label: outcomes.positive_label().to_string(),
            epsilon,
            verdicts: Criterion::ALL.iter().map(|&c| check(c, outcomes, epsilon)).collect(),
            impossibility: None,
            notes: Vec::new(),
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Positive label: {}. Tolerance: {}.\n", self.positive_label, self.epsilon);
        for note in &self.notes {
            let _ = writeln!(out, "- {note}");
        }
        if !self.notes.is_empty() {
            out.push('\n');
        }
        if self.verdicts.is_empty() {
            if let Some(imp) = &self.impossibility {
                out.push_str(&imp.to_markdown());
            }
            return out;
        }
        let _ = writeln!(out, "| criterion | max gap | verdict |");
        let _ = writeln!(out, "|---|---|---|");
        for v in &self.verdicts {
            let gap = v.max_gap.map_or("undefined".to_string(), |g| format!("{g:.4}"));
            let _ = writeln!(out, "| {} | {} | {} |", v.criterion, gap, if v.pass { "pass" } else { "fail" });
        }
        for v in &self.verdicts {
            let _ = writeln!(out, "\n### {}\n", v.criterion);
            let _ = writeln!(out, "| group | {} |", v.statistics.join(" | "));
            let _ = writeln!(out, "|---|{}", "---|".repeat(v.statistics.len()));
            for g in &v.groups {
                let cells: Vec<String> = g.values.iter().map(|x| fmt_rate(*x)).collect();
                let _ = writeln!(out, "| {} | {} |", g.group, cells.join(" | "));
            }
            for note in &v.notes {
                let _ = writeln!(out, "\n- {note}");
            }
        }
        if let Some(imp) = &self.impossibility {
            out.push('\n');
            out.push_str(&imp.to_markdown());
        }
        out
    }
}

fn fmt_pair(p: &PairGaps) -> String {
    let cal = p.calibration.map_or("undefined".to_string(), |c| format!("{c:.4}"));
    format!(
        "thresholds ({}, {}): calibration {cal}, FPR {:.4}, FNR {:.4}",
        p.threshold_a, p.threshold_b, p.fpr, p.fnr
    )
}

impl ImpossibilityReport {
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "### Threshold search\n");
        let _ = writeln!(
            out,
            "Groups `{}` (base rate {:.4}) and `{}` (base rate {:.4}); {} threshold pairs; tolerance {}.\n",
            self.groups[0], self.base_rates[0], self.groups[1], self.base_rates[1], self.pairs_evaluated, self.epsilon
        );
        let _ = writeln!(out, "- jointly feasible: {}", if self.jointly_feasible { "yes" } else { "no" });
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "- witness: {}", fmt_pair(w));
        }
        if let Some(p) = &self.best_calibration {
            let _ = writeln!(out, "- best calibration alone: {}", fmt_pair(p));
        }
        let _ = writeln!(out, "- best FPR balance alone: {}", fmt_pair(&self.best_fpr));
        let _ = writeln!(out, "- best FNR balance alone: {}", fmt_pair(&self.best_fnr));
        if let Some(p) = &self.best_joint {
            let _ = writeln!(out, "- best joint: {}", fmt_pair(p));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "- warning: {w}");
        }
        out
    }
}
