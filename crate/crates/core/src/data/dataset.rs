use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::schema::FeatureSchema;
use crate::error::{Error, Result};

/// Labeled rows conforming to a [`FeatureSchema`]. Immutable once built.
///
/// Feature values are stored row-major as `f64`: category-valued features
/// hold their category code, null-allowed cells hold `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: FeatureSchema,
    values: Vec<f64>,
    labels: Vec<usize>,
    groups: Option<Vec<String>>,
    provenance: String,
}

/// One row as handed to [`Dataset::from_rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub values: Vec<f64>,
    pub label: usize,
    pub group: Option<String>,
}

impl Dataset {
    pub fn from_rows(schema: FeatureSchema, rows: Vec<Record>, provenance: impl Into<String>) -> Result<Self> {
        schema.validate()?;
        let p = schema.n_features();
        let k = schema.n_labels();
        let mut values = Vec::with_capacity(rows.len() * p);
        let mut labels = Vec::with_capacity(rows.len());
        let with_groups = schema.group_attribute.is_some();
        let mut groups = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            if row.values.len() != p {
                return Err(Error::invalid(format!("row {} has {} values, expected {p}", i + 1, row.values.len())));
            }
            for (spec, &v) in schema.features.iter().zip(&row.values) {
                spec.check_value(v)
                    .map_err(|message| Error::Cell { row: i + 1, column: spec.name.clone(), message })?;
            }
            if row.label >= k {
                return Err(Error::Cell {
                    row: i + 1,
                    column: schema.label_column.clone(),
                    message: format!("label index {} out of range", row.label),
                });
            }
            match (with_groups, row.group) {
                (true, Some(g)) => groups.push(g),
                (true, None) => {
                    return Err(Error::invalid(format!("row {} lacks a group value", i + 1)));
                }
                (false, _) => {}
            }
            values.extend(row.values);
            labels.push(row.label);
        }
        Ok(Dataset {
            schema,
            values,
            labels,
            groups: with_groups.then_some(groups),
            provenance: provenance.into(),
        })
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.schema.n_features()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let p = self.n_features();
        &self.values[i * p..(i + 1) * p]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.values[row * self.n_features() + feature]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn group(&self, i: usize) -> Option<&str> {
        self.groups.as_ref().map(|g| g[i].as_str())
    }

    pub fn groups(&self) -> Option<&[String]> {
        self.groups.as_deref()
    }

    pub fn record(&self, i: usize) -> Record {
        Record { values: self.row(i).to_vec(), label: self.labels[i], group: self.group(i).map(str::to_string) }
    }

    pub fn label_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.schema.n_labels()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    pub fn label_frequencies(&self) -> Vec<f64> {
        let n = self.n_rows().max(1) as f64;
        self.label_counts().into_iter().map(|c| c as f64 / n).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let p = self.n_features();
        let mut values = Vec::with_capacity(indices.len() * p);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Dataset {
            schema: self.schema.clone(),
            values,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            groups: self.groups.as_ref().map(|g| indices.iter().map(|&i| g[i].clone()).collect()),
            provenance: self.provenance.clone(),
        }
    }

    /// Content hash over schema, values, labels and groups.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.schema.fingerprint().as_bytes());
        hasher.update((self.n_rows() as u64).to_le_bytes());
        for v in &self.values {
            hasher.update(v.to_bits().to_le_bytes());
        }
        for &l in &self.labels {
            hasher.update((l as u32).to_le_bytes());
        }
        if let Some(groups) = &self.groups {
            for g in groups {
                hasher.update(g.as_bytes());
                hasher.update([0u8]);
            }
        }
        hex::encode(&hasher.finalize()[..8])
    }

    pub fn load_csv(path: impl AsRef<Path>, schema: &FeatureSchema) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, schema, path.display().to_string())
    }

    /// Parse CSV text. Lines starting with `#` are comments; the first
    /// remaining line is the header. Columns may appear in any order.
    pub fn read_csv(reader: impl Read, schema: &FeatureSchema, provenance: impl Into<String>) -> Result<Self> {
        schema.validate()?;
        let mut csv = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = csv.headers()?.iter().map(str::to_string).collect();
        let position: HashMap<&str, usize> = header.iter().enumerate().map(|(i, h)| (h.as_str(), i)).collect();

        let mut expected: Vec<&str> = schema.features.iter().map(|f| f.name.as_str()).collect();
        expected.push(&schema.label_column);
        if let Some(g) = &schema.group_attribute {
            expected.push(g);
        }
        let missing: Vec<String> =
            expected.iter().filter(|n| !position.contains_key(*n)).map(|n| n.to_string()).collect();
        let mut extra: Vec<String> = header.iter().filter(|h| !expected.contains(&h.as_str())).cloned().collect();
        let mut seen = std::collections::HashSet::new();
        extra.extend(header.iter().filter(|h| !seen.insert(h.as_str())).cloned());
        if !missing.is_empty() || !extra.is_empty() {
            return Err(Error::ColumnMismatch { missing, extra });
        }

        let feature_cols: Vec<usize> = schema.features.iter().map(|f| position[f.name.as_str()]).collect();
        let label_col = position[schema.label_column.as_str()];
        let group_col = schema.group_attribute.as_ref().map(|g| position[g.as_str()]);

        let mut rows = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let mut values = Vec::with_capacity(feature_cols.len());
            for (spec, &col) in schema.features.iter().zip(&feature_cols) {
                let cell = record.get(col).unwrap_or("");
                let v = spec
                    .parse_cell(cell)
                    .map_err(|message| Error::Cell { row, column: spec.name.clone(), message })?;
                values.push(v);
            }
            let raw_label = record.get(label_col).unwrap_or("");
            let label = schema.label_index(raw_label).ok_or_else(|| Error::Cell {
                row,
                column: schema.label_column.clone(),
                message: format!("label `{raw_label}` is not in the label set"),
            })?;
            let group = group_col.map(|c| record.get(c).unwrap_or("").to_string());
            rows.push(Record { values, label, group });
        }
        Dataset::from_rows(schema.clone(), rows, provenance)
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>, comments: &[String]) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write_csv(&mut out, comments)?;
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Write the header in schema order followed by every row. `comments`
    /// are emitted first as `# ` lines.
    pub fn write_csv(&self, mut out: impl Write, comments: &[String]) -> Result<()> {
        for c in comments {
            for line in c.lines() {
                writeln!(out, "# {line}").map_err(|e| Error::io("<csv>", e))?;
            }
        }
        let mut csv = csv::Writer::from_writer(out);
        let mut header: Vec<&str> = self.schema.features.iter().map(|f| f.name.as_str()).collect();
        header.push(&self.schema.label_column);
        if let Some(g) = &self.schema.group_attribute {
            header.push(g);
        }
        csv.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut cells: Vec<String> =
                self.schema.features.iter().zip(self.row(i)).map(|(s, &v)| s.format_cell(v)).collect();
            cells.push(self.schema.labels[self.labels[i]].clone());
            if let Some(g) = self.group(i) {
                cells.push(g.to_string());
            }
            csv.write_record(&cells)?;
        }
        csv.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Seeded disjoint train/holdout partition. The holdout part has
/// `round(fraction * n)` rows; both parts keep the original row order.
pub fn split_holdout(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, holdout) = split_indices(data.n_rows(), fraction, seed)?;
    Ok((data.subset(&train), data.subset(&holdout)))
}

fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n < 2 {
        return Err(Error::invalid("a holdout split needs at least two rows"));
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid(format!("holdout fraction {fraction} outside (0, 1)")));
    }
    let n_holdout = (fraction * n as f64).round() as usize;
    if n_holdout == 0 || n_holdout == n {
        return Err(Error::invalid(format!("holdout fraction {fraction} of {n} rows leaves an empty part")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut holdout = order[..n_holdout].to_vec();
    let mut train = order[n_holdout..].to_vec();
    holdout.sort_unstable();
    train.sort_unstable();
    Ok((train, holdout))
}
