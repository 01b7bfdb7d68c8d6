use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// K x K forecast-by-actual tally. Rows are forecasts, columns are actual
/// outcomes, both in label order. Cells may be counts or percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    labels: Vec<String>,
    /// Row-major, `cells[forecast * k + actual]`.
    cells: Vec<f64>,
}

/// One-vs-rest reduction of a confusion matrix around one label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryCounts {
    pub tp: f64,
    pub fp: f64,
    pub fn_: f64,
    pub tn: f64,
}

/// `num / den`, or `None` when the denominator is zero.
pub fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = labels.len();
        if k < 2 {
            return Err(Error::invalid("a confusion matrix needs at least two labels"));
        }
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::invalid(format!("confusion matrix must be {k} x {k}")));
        }
        let cells: Vec<f64> = rows.into_iter().flatten().collect();
        if cells.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return Err(Error::invalid("confusion matrix cells must be finite and nonnegative"));
        }
        if cells.iter().sum::<f64>() <= 0.0 {
            return Err(Error::invalid("confusion matrix total must be positive"));
        }
        Ok(ConfusionMatrix { labels, cells })
    }

    /// Tally label-index pairs.
    pub fn from_indices(predicted: &[usize], actual: &[usize], labels: &[String]) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::invalid(format!(
                "{} predictions for {} actual labels",
                predicted.len(),
                actual.len()
            )));
        }
        if predicted.is_empty() {
            return Err(Error::invalid("no predictions to tally"));
        }
        let k = labels.len();
        let mut rows = vec![vec![0.0; k]; k];
        for (&p, &a) in predicted.iter().zip(actual) {
            if p >= k || a >= k {
                return Err(Error::invalid(format!("label index {} out of range", p.max(a))));
            }
            rows[p][a] += 1.0;
        }
        Self::new(labels.to_vec(), rows)
    }

    /// Tally label-name pairs; every name must be in `labels`.
    pub fn from_predictions<S: AsRef<str>>(predicted: &[S], actual: &[S], labels: &[String]) -> Result<Self> {
        let index = |name: &S| {
            labels
                .iter()
                .position(|l| l == name.as_ref())
                .ok_or_else(|| Error::invalid(format!("unknown label `{}`", name.as_ref())))
        };
        let predicted: Vec<usize> = predicted.iter().map(index).collect::<Result<_>>()?;
        let actual: Vec<usize> = actual.iter().map(index).collect::<Result<_>>()?;
        Self::from_indices(&predicted, &actual, labels)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.labels.len()
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    pub fn cell(&self, forecast: usize, actual: usize) -> f64 {
        self.cells[forecast * self.k() + actual]
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.k()).map(|i| self.cell(i, i)).sum()
    }

    /// Weight forecast as `forecast`.
    pub fn row_sum(&self, forecast: usize) -> f64 {
        (0..self.k()).map(|a| self.cell(forecast, a)).sum()
    }

    /// Weight actually `actual`.
    pub fn column_sum(&self, actual: usize) -> f64 {
        (0..self.k()).map(|f| self.cell(f, actual)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ConfusionMatrix { labels: self.labels.clone(), cells: self.cells.iter().map(|c| c * factor).collect() }
    }

    pub fn one_vs_rest(&self, label: usize) -> BinaryCounts {
        let tp = self.cell(label, label);
        let fp = self.row_sum(label) - tp;
        let fn_ = self.column_sum(label) - tp;
        let tn = self.total() - tp - fp - fn_;
        BinaryCounts { tp, fp, fn_, tn }
    }

    /// Weight of dangerous errors (actually `high`, forecast as anything
    /// else) and cautious errors (forecast `high`, actually anything else).
    pub fn cost_errors(&self, high: usize) -> (f64, f64) {
        let counts = self.one_vs_rest(high);
        (counts.fn_, counts.fp)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }

    /// Parse a matrix whose header row lists the actual labels after one
    /// corner cell and whose rows start with the forecast label. Rows may
    /// come in any order but must cover the same labels as the columns.
    pub fn read_csv(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let header = csv.headers()?.clone();
        let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let k = labels.len();
        let position: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        if position.len() != k {
            return Err(Error::invalid("duplicate column label in confusion matrix"));
        }
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; k];
        for (i, record) in csv.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let name = record.get(0).unwrap_or("");
            let forecast = *position.get(name).ok_or_else(|| Error::Format {
                what: "confusion matrix",
                line,
                message: format!("row label `{name}` is not a column label"),
            })?;
            if rows[forecast].is_some() {
                return Err(Error::Format { what: "confusion matrix", line, message: format!("duplicate row `{name}`") });
            }
            if record.len() != k + 1 {
                return Err(Error::Format {
                    what: "confusion matrix",
                    line,
                    message: format!("expected {} cells, found {}", k, record.len().saturating_sub(1)),
                });
            }
            let cells = record
                .iter()
                .skip(1)
                .zip(&labels)
                .map(|(cell, column)| {
                    cell.trim_end_matches('%').parse::<f64>().map_err(|_| Error::Cell {
                        row: i + 1,
                        column: column.clone(),
                        message: format!("`{cell}` is not a number"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows[forecast] = Some(cells);
        }
        let rows = rows
            .into_iter()
            .zip(&labels)
            .map(|(r, l)| r.ok_or_else(|| Error::invalid(format!("confusion matrix lacks forecast row `{l}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels, rows)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut csv = csv::Writer::from_writer(out);
        let mut header = vec!["forecast\\actual".to_string()];
        header.extend(self.labels.iter().cloned());
        csv.write_record(&header)?;
        for f in 0..self.k() {
            let mut record = vec![self.labels[f].clone()];
            record.extend((0..self.k()).map(|a| self.cell(f, a).to_string()));
            csv.write_record(&record)?;
        }
        csv.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is UTF-8")
    }

    /// Markdown rendering with row and column totals.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| Forecast \\ Actual |");
        for l in &self.labels {
            out.push_str(&format!(" {l} |"));
        }
        out.push_str(" Total |\n|---|");
        out.push_str(&"---:|".repeat(self.k() + 1));
        out.push('\n');
        for f in 0..self.k() {
            out.push_str(&format!("| {} |", self.labels[f]));
            for a in 0..self.k() {
                out.push_str(&format!(" {} |", fmt_cell(self.cell(f, a))));
            }
            out.push_str(&format!(" {} |\n", fmt_cell(self.row_sum(f))));
        }
        out.push_str("| Total |");
        for a in 0..self.k() {
            out.push_str(&format!(" {} |", fmt_cell(self.column_sum(a))));
        }
        out.push_str(&format!(" {} |\n", fmt_cell(self.total())));
        out
    }
}

fn fmt_cell(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels() -> Vec<String> {
        ["High", "Moderate", "Low"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn diagonal_when_predictions_match() {
        let ys: Vec<usize> = (0..10).map(|i| i % 3).collect();
        let cm = ConfusionMatrix::from_indices(&ys, &ys, &labels()).unwrap();
        assert_eq!(cm.total(), 10.0);
        assert_eq!(cm.trace(), 10.0);
    }

    #[test]
    fn single_off_diagonal_cell() {
        let pred = vec!["High"; 4];
        let actual = vec!["Low"; 4];
        let cm = ConfusionMatrix::from_predictions(&pred, &actual, &labels()).unwrap();
        assert_eq!(cm.cell(0, 2), 4.0);
        assert_eq!(cm.total(), 4.0);
        assert_eq!(cm.trace(), 0.0);
    }

    #[test]
    fn rejects_mismatch_and_unknown() {
        assert!(ConfusionMatrix::from_indices(&[0, 1], &[0], &labels()).is_err());
        assert!(ConfusionMatrix::from_indices(&[], &[], &labels()).is_err());
        assert!(ConfusionMatrix::from_predictions(&["High"], &["Unknown"], &labels()).is_err());
        assert!(ConfusionMatrix::new(labels(), vec![vec![0.0; 3]; 3]).is_err());
        assert!(ConfusionMatrix::new(labels(), vec![vec![1.0; 3]; 2]).is_err());
    }

    #[test]
    fn csv_round_trip_and_row_order() {
        let text = "Forecast/Actual,High,Moderate,Low\nLow,0.73,5.81,24.02\nHigh,6.26,10.01,2.23\nModerate,4.88,32.53,13.55\n";
        let cm = ConfusionMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(cm.cell(0, 2), 2.23);
        assert_eq!(cm.cell(2, 0), 0.73);
        let back = ConfusionMatrix::read_csv(cm.to_csv_string().as_bytes()).unwrap();
        assert_eq!(back, cm);
    }

    #[test]
    fn csv_errors() {
        let missing_row = "x,A,B\nA,1,2\n";
        assert!(ConfusionMatrix::read_csv(missing_row.as_bytes()).is_err());
        let bad_cell = "x,A,B\nA,1,2\nB,zz,1\n";
        let err = ConfusionMatrix::read_csv(bad_cell.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("`A`"), "{err}");
    }

    #[test]
    fn one_vs_rest_and_cost_errors() {
        let cm = ConfusionMatrix::new(
            labels(),
            vec![vec![5.0, 2.0, 1.0], vec![3.0, 10.0, 4.0], vec![1.0, 2.0, 20.0]],
        )
        .unwrap();
        let high = cm.one_vs_rest(0);
        assert_eq!(high, BinaryCounts { tp: 5.0, fp: 3.0, fn_: 4.0, tn: 36.0 });
        assert_eq!(cm.cost_errors(0), (4.0, 3.0));
    }
}
