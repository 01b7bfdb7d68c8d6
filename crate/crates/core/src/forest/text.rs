//! Forest files: a header carrying the config and fingerprints, then each
//! tree in the tree text format. Bootstrap draws are not stored; they are
//! replayed from the config's seed on load.

use std::fmt::Write as _;
use std::path::Path;

use super::train::{draw_rows, tree_rng};
use super::{Forest, ForestConfig};
use crate::error::{Error, Result};
use crate::tree::{parse_tree, Node};

pub const FOREST_FORMAT_VERSION: u32 = 1;

fn format_error(line: usize, message: impl Into<String>) -> Error {
    Error::Format { what: "forest", line, message: message.into() }
}

impl Forest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "riskforest-forest v{FOREST_FORMAT_VERSION}").unwrap();
        let config = serde_json::to_string(&self.config).expect("config serializes");
        writeln!(out, "config {config}").unwrap();
        writeln!(out, "labels {}", serde_json::to_string(&self.labels).expect("labels serialize")).unwrap();
        writeln!(out, "schema {} features={}", self.schema_fingerprint, self.n_features).unwrap();
        writeln!(out, "data {} rows={}", self.data_fingerprint, self.n_train_rows).unwrap();
        for tree in &self.trees {
            tree.write_text(&mut out);
        }
        writeln!(out, "end").unwrap();
        out
    }

    pub fn from_text(text: &str) -> Result<Forest> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |key: &str| -> Result<(usize, String)> {
            let (line, content) = lines.next().ok_or_else(|| format_error(0, format!("missing `{key}` line")))?;
            let rest = content
                .strip_prefix(key)
                .ok_or_else(|| format_error(line, format!("expected `{key}`")))?;
            Ok((line, rest.trim().to_string()))
        };

        let (line, version) = next("riskforest-forest")?;
        if version != format!("v{FOREST_FORMAT_VERSION}") {
            return Err(format_error(line, format!("unsupported forest format `{version}`")));
        }
        let (line, config) = next("config")?;
        let config: ForestConfig = serde_json::from_str(&config).map_err(|e| format_error(line, e.to_string()))?;
        let (line, labels) = next("labels")?;
        let labels: Vec<String> = serde_json::from_str(&labels).map_err(|e| format_error(line, e.to_string()))?;
        config.validate(labels.len()).map_err(|e| format_error(line, e.to_string()))?;
        let (line, schema) = next("schema")?;
        let (schema_fingerprint, n_features) = fingerprint_and_count(&schema, "features", line)?;
        let (line, data) = next("data")?;
        let (data_fingerprint, n_train_rows) = fingerprint_and_count(&data, "rows", line)?;
        if n_train_rows == 0 {
            return Err(format_error(line, "training row count must be positive"));
        }

        let mut trees = Vec::with_capacity(config.n_trees);
        let mut inbag = Vec::with_capacity(config.n_trees);
        for index in 0..config.n_trees {
            let tree = parse_tree(&mut lines)?;
            if tree.n_labels() != labels.len() {
                return Err(format_error(0, format!("tree {index} has {} labels", tree.n_labels())));
            }
            let bad_feature = tree.nodes().iter().any(|n| match n {
                Node::Split { rule, .. } => rule.feature >= n_features,
                Node::Leaf { .. } => false,
            });
            if bad_feature {
                return Err(format_error(0, format!("tree {index} splits on a feature beyond {n_features}")));
            }
            trees.push(tree);
            inbag.push(draw_rows(&config, n_train_rows, &mut tree_rng(config.master_seed, index)));
        }
        match lines.next() {
            Some((_, "end")) => {}
            Some((line, other)) => return Err(format_error(line, format!("expected `end`, found `{other}`"))),
            None => return Err(format_error(0, "missing `end` line")),
        }

        Ok(Forest {
            config,
            trees,
            inbag,
            labels,
            n_features,
            schema_fingerprint,
            data_fingerprint,
            n_train_rows,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Forest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Forest::from_text(&text)
    }
}

fn fingerprint_and_count(text: &str, key: &str, line: usize) -> Result<(String, usize)> {
    let mut parts = text.split_whitespace();
    let fingerprint = parts.next().ok_or_else(|| format_error(line, "missing fingerprint"))?;
    let count = parts
        .next()
        .and_then(|p| p.strip_prefix(key))
        .and_then(|p| p.strip_prefix('='))
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| format_error(line, format!("expected `{key}=<n>`")))?;
    Ok((fingerprint.to_string(), count))
}
