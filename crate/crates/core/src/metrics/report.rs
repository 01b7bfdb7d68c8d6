use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::confusion::{ratio, ConfusionMatrix};
use crate::error::{Error, Result};

/// One-vs-rest rates for one label. `None` marks a zero denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub label: String,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub precision: Option<f64>,
    pub false_discovery_rate: Option<f64>,
    pub false_omission_rate: Option<f64>,
}

/// Extreme-error rates between the highest- and lowest-risk labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskErrors {
    pub high_label: String,
    pub low_label: String,
    /// Share of forecast-low weight that was actually high.
    pub very_dangerous: Option<f64>,
    /// Share of forecast-high weight that was actually low.
    pub very_cautious: Option<f64>,
    /// Weight of actual-high rows forecast as any other label.
    pub dangerous_errors: f64,
    /// Weight of forecast-high rows that were actually any other label.
    pub cautious_errors: f64,
    /// `cautious_errors / dangerous_errors`.
    pub cautious_per_dangerous: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub overall_accuracy: f64,
    pub per_label: Vec<LabelMetrics>,
    pub risk_errors: Option<RiskErrors>,
    pub total: f64,
    pub notes: Vec<String>,
}

impl MetricReport {
    pub fn label(&self, name: &str) -> Option<&LabelMetrics> {
        self.per_label.iter().find(|m| m.label == name)
    }

    /// Measures laid out one per row, as in a published performance table.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Measure | Label | Value |\n|---|---|---:|\n");
        writeln!(out, "| Overall accuracy | | {} |", fmt_rate(Some(self.overall_accuracy))).unwrap();
        let rows: [(&str, fn(&LabelMetrics) -> Option<f64>); 5] = [
            ("Sensitivity / recall", |m| m.sensitivity),
            ("Specificity", |m| m.specificity),
            ("Precision", |m| m.precision),
            ("False discovery rate", |m| m.false_discovery_rate),
            ("False omission rate", |m| m.false_omission_rate),
        ];
        for (name, get) in rows {
            for m in &self.per_label {
                writeln!(out, "| {name} | {} | {} |", m.label, fmt_rate(get(m))).unwrap();
            }
        }
        if let Some(r) = &self.risk_errors {
            writeln!(out, "| Very dangerous errors | {} forecast, {} actual | {} |", r.low_label, r.high_label, fmt_rate(r.very_dangerous))
                .unwrap();
            writeln!(out, "| Very cautious errors | {} forecast, {} actual | {} |", r.high_label, r.low_label, fmt_rate(r.very_cautious))
                .unwrap();
            writeln!(out, "| Cautious per dangerous error | | {} |", fmt_ratio(r.cautious_per_dangerous)).unwrap();
        }
        for note in &self.notes {
            writeln!(out, "\n_{note}_").unwrap();
        }
        out
    }
}

pub fn fmt_rate(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{:.2}%", v * 100.0),
        None => "undefined".to_string(),
    }
}

fn fmt_ratio(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v:.3}"),
        None => "undefined".to_string(),
    }
}

/// Every per-label one-vs-rest measure plus overall accuracy and, when both
/// risk roles are named, the extreme-error rates.
pub fn derive_metrics(cm: &ConfusionMatrix, high_label: Option<&str>, low_label: Option<&str>) -> Result<MetricReport> {
    let role = |name: Option<&str>| -> Result<Option<usize>> {
        name.map(|n| cm.label_index(n).ok_or_else(|| Error::invalid(format!("label `{n}` not in the matrix"))))
            .transpose()
    };
    let high = role(high_label)?;
    let low = role(low_label)?;

    let per_label = (0..cm.k())
        .map(|l| {
            let c = cm.one_vs_rest(l);
            LabelMetrics {
                label: cm.labels()[l].clone(),
                sensitivity: ratio(c.tp, c.tp + c.fn_),
                specificity: ratio(c.tn, c.tn + c.fp),
                precision: ratio(c.tp, c.tp + c.fp),
                false_discovery_rate: ratio(c.fp, c.tp + c.fp),
                false_omission_rate: ratio(c.fn_, c.fn_ + c.tn),
            }
        })
        .collect();

    let risk_errors = match (high, low) {
        (Some(h), Some(l)) => {
            let (dangerous, cautious) = cm.cost_errors(h);
            Some(RiskErrors {
                high_label: cm.labels()[h].clone(),
                low_label: cm.labels()[l].clone(),
                very_dangerous: ratio(cm.cell(l, h), cm.row_sum(l)),
                very_cautious: ratio(cm.cell(h, l), cm.row_sum(h)),
                dangerous_errors: dangerous,
                cautious_errors: cautious,
                cautious_per_dangerous: ratio(cautious, dangerous),
            })
        }
        _ => None,
    };

    Ok(MetricReport {
        overall_accuracy: cm.trace() / cm.total(),
        per_label,
        risk_errors,
        total: cm.total(),
        notes: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels() -> Vec<String> {
        ["High", "Moderate", "Low"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_diagonal() {
        let cm = ConfusionMatrix::new(labels(), vec![vec![3.0, 0.0, 0.0], vec![0.0, 5.0, 0.0], vec![0.0, 0.0, 2.0]])
            .unwrap();
        let report = derive_metrics(&cm, Some("High"), Some("Low")).unwrap();
        assert_eq!(report.overall_accuracy, 1.0);
        for m in &report.per_label {
            assert_eq!(m.sensitivity, Some(1.0));
            assert_eq!(m.precision, Some(1.0));
        }
        let r = report.risk_errors.unwrap();
        assert_eq!((r.very_dangerous, r.very_cautious), (Some(0.0), Some(0.0)));
        assert_eq!(r.cautious_per_dangerous, None);
    }

    #[test]
    fn zero_denominators_are_undefined() {
        // Nothing forecast as High.
        let cm = ConfusionMatrix::new(labels(), vec![vec![0.0, 0.0, 0.0], vec![1.0, 5.0, 0.0], vec![0.0, 1.0, 2.0]])
            .unwrap();
        let report = derive_metrics(&cm, Some("High"), Some("Low")).unwrap();
        let high = report.label("High").unwrap();
        assert_eq!(high.precision, None);
        assert_eq!(high.false_discovery_rate, None);
        assert_eq!(high.sensitivity, Some(0.0));
        assert_eq!(report.risk_errors.unwrap().very_cautious, None);
        assert!(derive_metrics(&cm, Some("Nope"), None).is_err());
        assert!(report_markdown_mentions_undefined(&cm));
    }

    fn report_markdown_mentions_undefined(cm: &ConfusionMatrix) -> bool {
        derive_metrics(cm, None, None).unwrap().to_markdown().contains("undefined")
    }
}
