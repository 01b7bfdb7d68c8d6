//! Declarative description of the input columns of a risk-assessment table.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Name of the catch-all bucket every categorical feature must carry.
pub const OTHER: &str = "OTHER";

/// Code recorded in years-since columns when the suspect has no relevant history.
pub const MISSING_HISTORY_CODE: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureKind {
    Numeric,
    Count,
    YearsSince,
    Categorical,
    Binary,
}

impl FeatureKind {
    /// Kinds split by a numeric threshold rather than a category subset.
    pub fn is_ordered(self) -> bool {
        matches!(self, FeatureKind::Numeric | FeatureKind::Count | FeatureKind::YearsSince)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sentinel {
    /// An empty or `null` cell is accepted and stored as `+inf`, which sorts
    /// after every measured value.
    NullAllowed,
    /// An empty or `null` cell is normalized to this code. A measured value
    /// equal to the code is indistinguishable from it.
    MissingHistoryCode(u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentinel: Option<Sentinel>,
}

impl FeatureSpec {
    pub fn numeric(name: &str) -> Self {
        Self::plain(name, FeatureKind::Numeric)
    }

    pub fn count(name: &str) -> Self {
        Self::plain(name, FeatureKind::Count)
    }

    pub fn binary(name: &str) -> Self {
        Self::plain(name, FeatureKind::Binary)
    }

    pub fn years_since(name: &str) -> Self {
        FeatureSpec {
            sentinel: Some(Sentinel::MissingHistoryCode(MISSING_HISTORY_CODE)),
            ..Self::plain(name, FeatureKind::YearsSince)
        }
    }

    /// Categorical feature over `codes` plus the trailing `OTHER` bucket.
    pub fn categorical<S: AsRef<str>>(name: &str, codes: &[S]) -> Self {
        let mut categories: Vec<String> = codes.iter().map(|c| c.as_ref().to_string()).collect();
        categories.push(OTHER.to_string());
        FeatureSpec { categories, ..Self::plain(name, FeatureKind::Categorical) }
    }

    pub fn with_sentinel(mut self, sentinel: Sentinel) -> Self {
        self.sentinel = Some(sentinel);
        self
    }

    fn plain(name: &str, kind: FeatureKind) -> Self {
        FeatureSpec { name: name.to_string(), kind, categories: Vec::new(), sentinel: None }
    }

    /// Number of admissible codes for category-valued kinds.
    pub fn cardinality(&self) -> Option<usize> {
        match self.kind {
            FeatureKind::Categorical => Some(self.categories.len()),
            FeatureKind::Binary => Some(2),
            _ => None,
        }
    }

    pub fn other_code(&self) -> Option<usize> {
        self.categories.iter().position(|c| c == OTHER)
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Schema(format!("feature `{}`: {msg}", self.name)));
        if self.name.trim().is_empty() {
            return Err(Error::Schema("feature with empty name".into()));
        }
        match self.kind {
            FeatureKind::Categorical => {
                if self.categories.len() < 2 {
                    return fail("categorical features need at least two categories");
                }
                if self.categories.iter().filter(|c| *c == OTHER).count() != 1 {
                    return fail("categorical features need exactly one OTHER bucket");
                }
                let unique: HashSet<&String> = self.categories.iter().collect();
                if unique.len() != self.categories.len() {
                    return fail("duplicate category");
                }
            }
            _ if !self.categories.is_empty() => return fail("only categorical features take categories"),
            _ => {}
        }
        match (self.kind, self.sentinel) {
            (FeatureKind::YearsSince, Some(Sentinel::MissingHistoryCode(_))) => Ok(()),
            (FeatureKind::YearsSince, _) => fail("years-since features need a missing-history-code sentinel"),
            (_, Some(Sentinel::MissingHistoryCode(_))) => {
                fail("missing-history-code applies to years-since features only")
            }
            (FeatureKind::Categorical | FeatureKind::Binary, Some(Sentinel::NullAllowed)) => {
                fail("null-allowed applies to numeric and count features only")
            }
            _ => Ok(()),
        }
    }

    /// Parse one CSV cell into its stored representation.
    pub fn parse_cell(&self, raw: &str) -> std::result::Result<f64, String> {
        let cell = raw.trim();
        if is_null(cell) {
            return match self.sentinel {
                Some(Sentinel::NullAllowed) => Ok(f64::INFINITY),
                Some(Sentinel::MissingHistoryCode(code)) => Ok(code as f64),
                None => Err("empty cell".into()),
            };
        }
        match self.kind {
            FeatureKind::Categorical => {
                match self.categories.iter().position(|c| c == cell) {
                    Some(code) => Ok(code as f64),
                    None => self
                        .other_code()
                        .map(|code| code as f64)
                        .ok_or_else(|| format!("unknown category `{cell}`")),
                }
            }
            FeatureKind::Binary => match cell.to_ascii_lowercase().as_str() {
                "0" | "no" | "n" | "false" => Ok(0.0),
                "1" | "yes" | "y" | "true" => Ok(1.0),
                _ => Err(format!("`{cell}` is not a binary value")),
            },
            _ => {
                let value: f64 = cell.parse().map_err(|_| format!("`{cell}` is not a number"))?;
                self.check_value(value).map(|()| value)
            }
        }
    }

    /// Whether `value` is a legal stored value for this spec.
    pub fn check_value(&self, value: f64) -> std::result::Result<(), String> {
        if value == f64::INFINITY && self.sentinel == Some(Sentinel::NullAllowed) {
            return Ok(());
        }
        if !value.is_finite() {
            return Err(format!("{value} is not finite"));
        }
        match self.kind {
            FeatureKind::Numeric => Ok(()),
            FeatureKind::Count if value >= 0.0 && value.fract() == 0.0 => Ok(()),
            FeatureKind::Count => Err(format!("{value} is not a nonnegative integer count")),
            FeatureKind::YearsSince if value >= 0.0 => Ok(()),
            FeatureKind::YearsSince => Err(format!("{value} is negative")),
            FeatureKind::Categorical | FeatureKind::Binary => {
                let k = self.cardinality().unwrap_or(0);
                if value >= 0.0 && value.fract() == 0.0 && (value as usize) < k {
                    Ok(())
                } else {
                    Err(format!("{value} is not a category code below {k}"))
                }
            }
        }
    }

    /// Render a stored value back into CSV text.
    pub fn format_cell(&self, value: f64) -> String {
        match self.kind {
            FeatureKind::Categorical => self.categories[value as usize].clone(),
            _ if value == f64::INFINITY => String::new(),
            _ => value.to_string(),
        }
    }
}

fn is_null(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("null") || cell.eq_ignore_ascii_case("na")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    #[serde(default = "default_label_column")]
    pub label_column: String,
    /// Ordered from highest to lowest risk.
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_attribute: Option<String>,
    #[serde(rename = "feature")]
    pub features: Vec<FeatureSpec>,
}

fn default_label_column() -> String {
    "label".to_string()
}

impl FeatureSchema {
    pub fn new(features: Vec<FeatureSpec>, labels: Vec<String>, group_attribute: Option<String>) -> Result<Self> {
        let schema = FeatureSchema { label_column: default_label_column(), labels, group_attribute, features };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::Schema("no features".into()));
        }
        let mut names = HashSet::new();
        for spec in &self.features {
            spec.validate()?;
            if !names.insert(spec.name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name `{}`", spec.name)));
            }
        }
        let labels: HashSet<&String> = self.labels.iter().collect();
        if self.labels.len() < 2 || labels.len() != self.labels.len() {
            return Err(Error::Schema("label set needs at least two distinct names".into()));
        }
        if names.contains(self.label_column.as_str()) {
            return Err(Error::Schema(format!("label column `{}` clashes with a feature", self.label_column)));
        }
        if let Some(group) = &self.group_attribute {
            if names.contains(group.as_str()) || *group == self.label_column {
                return Err(Error::Schema(format!("group attribute `{group}` clashes with another column")));
            }
        }
        Ok(())
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }

    /// Same schema with the group attribute replaced.
    pub fn with_group_attribute(mut self, group: Option<&str>) -> Result<Self> {
        self.group_attribute = group.map(str::to_string);
        self.validate()?;
        Ok(self)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let schema: FeatureSchema = toml::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("schema serializes to TOML")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Short content hash of the features and labels; models refuse data
    /// with another one. The group attribute is audit metadata and is left out.
    pub fn fingerprint(&self) -> String {
        let model_view = FeatureSchema { group_attribute: None, ..self.clone() };
        let digest = Sha256::digest(model_view.to_toml().as_bytes());
        hex::encode(&digest[..8])
    }

    /// The 34-feature custody-event schema with High/Moderate/Low outcome labels.
    pub fn hart() -> Self {
        let postcodes: Vec<String> = (1..=24).map(|i| format!("PC{i:02}")).collect();
        let mosaic: Vec<String> = (1..=28).map(|i| format!("MOSAIC{i:02}")).collect();
        let features = vec![
            FeatureSpec::numeric("CustodyAge"),
            FeatureSpec::categorical("Gender", &["Female", "Male"]),
            FeatureSpec::count("InstantAnyOffenceCount"),
            FeatureSpec::binary("InstantViolenceOffenceBinary"),
            FeatureSpec::binary("InstantPropertyOffenceBinary"),
            FeatureSpec::categorical("CustodyPostcodeOutwardTop24", &postcodes),
            FeatureSpec::categorical("CustodyMosaicCodeTop28", &mosaic),
            FeatureSpec::numeric("FirstAnyOffenceAge"),
            FeatureSpec::numeric("FirstViolenceOffenceAge").with_sentinel(Sentinel::NullAllowed),
            FeatureSpec::numeric("FirstSexualOffenceAge").with_sentinel(Sentinel::NullAllowed),
            FeatureSpec::numeric("FirstWeaponOffenceAge").with_sentinel(Sentinel::NullAllowed),
            FeatureSpec::numeric("FirstDrugOffenceAge").with_sentinel(Sentinel::NullAllowed),
            FeatureSpec::numeric("FirstPropertyOffenceAge").with_sentinel(Sentinel::NullAllowed),
            FeatureSpec::count("PriorAnyOffenceCount"),
            FeatureSpec::years_since("PriorAnyOffenceLatestYears"),
            FeatureSpec::count("PriorMurderOffenceCount"),
            FeatureSpec::count("PriorSeriousOffenceCount"),
            FeatureSpec::years_since("PriorSeriousOffenceLatestYears"),
            FeatureSpec::count("PriorViolenceOffenceCount"),
            FeatureSpec::years_since("PriorViolenceOffenceLatestYears"),
            FeatureSpec::count("PriorSexualOffenceCount"),
            FeatureSpec::years_since("PriorSexualOffenceLatestYears"),
            FeatureSpec::count("PriorSexRegOffenceCount"),
            FeatureSpec::count("PriorWeaponOffenceCount"),
            FeatureSpec::years_since("PriorWeaponOffenceLatestYears"),
            FeatureSpec::count("PriorFirearmOffenceCount"),
            FeatureSpec::count("PriorDrugOffenceCount"),
            FeatureSpec::years_since("PriorDrugOffenceLatestYears"),
            FeatureSpec::count("PriorDrugDistOffenceCount"),
            FeatureSpec::count("PriorPropertyOffenceCount"),
            FeatureSpec::years_since("PriorPropertyOffenceLatestYears"),
            FeatureSpec::count("PriorCustodyCount"),
            FeatureSpec::years_since("PriorCustodyLatestYears"),
            FeatureSpec::count("PriorIntelCount"),
        ];
        let labels = ["High", "Moderate", "Low"].iter().map(|s| s.to_string()).collect();
        FeatureSchema::new(features, labels, None).expect("bundled schema is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_schema_shape() {
        let schema = FeatureSchema::hart();
        assert_eq!(schema.n_features(), 34);
        assert_eq!(schema.labels, ["High", "Moderate", "Low"]);
        let postcode = &schema.features[schema.feature_index("CustodyPostcodeOutwardTop24").unwrap()];
        assert_eq!(postcode.categories.len(), 25);
        let mosaic = &schema.features[schema.feature_index("CustodyMosaicCodeTop28").unwrap()];
        assert_eq!(mosaic.categories.len(), 29);
        let years = schema.features.iter().filter(|f| f.kind == FeatureKind::YearsSince).count();
        assert_eq!(years, 8);
    }

    #[test]
    fn toml_round_trip() {
        let schema = FeatureSchema::hart();
        let back = FeatureSchema::from_toml(&schema.to_toml()).unwrap();
        assert_eq!(schema, back);
        assert_eq!(schema.fingerprint(), back.fingerprint());
    }

    #[test]
    fn fingerprint_ignores_group_attribute() {
        let schema = FeatureSchema::hart();
        let grouped = schema.clone().with_group_attribute(Some("group")).unwrap();
        assert_eq!(schema.fingerprint(), grouped.fingerprint());
        let mut relabeled = schema.clone();
        relabeled.labels.swap(0, 2);
        assert_ne!(schema.fingerprint(), relabeled.fingerprint());
    }

    #[test]
    fn rejects_categorical_without_other() {
        let mut spec = FeatureSpec::categorical("c", &["a", "b"]);
        spec.categories.pop();
        let err = FeatureSchema::new(vec![spec], vec!["x".into(), "y".into()], None).unwrap_err();
        assert!(err.to_string().contains("OTHER"), "{err}");
    }

    #[test]
    fn rejects_years_since_without_sentinel() {
        let mut spec = FeatureSpec::years_since("y");
        spec.sentinel = None;
        assert!(FeatureSchema::new(vec![spec], vec!["x".into(), "y".into()], None).is_err());
    }

    #[test]
    fn rejects_duplicate_names_and_label_clash() {
        let f = FeatureSpec::numeric("a");
        let labels = vec!["x".to_string(), "y".to_string()];
        assert!(FeatureSchema::new(vec![f.clone(), f.clone()], labels.clone(), None).is_err());
        assert!(FeatureSchema::new(vec![f.clone()], vec!["x".into(), "x".into()], None).is_err());
        assert!(FeatureSchema::new(vec![f], labels, Some("a".into())).is_err());
    }

    #[test]
    fn sentinel_cells() {
        let schema = FeatureSchema::hart();
        let serious = &schema.features[schema.feature_index("PriorSeriousOffenceLatestYears").unwrap()];
        assert_eq!(serious.parse_cell("100"), Ok(100.0));
        assert_eq!(serious.parse_cell(""), Ok(100.0));
        let any = &schema.features[schema.feature_index("PriorAnyOffenceLatestYears").unwrap()];
        assert_eq!(any.parse_cell("null"), Ok(100.0));
        let first = &schema.features[schema.feature_index("FirstSexualOffenceAge").unwrap()];
        assert_eq!(first.parse_cell("NULL"), Ok(f64::INFINITY));
        assert_eq!(first.format_cell(f64::INFINITY), "");
        let age = &schema.features[0];
        assert!(age.parse_cell("").is_err());
    }

    #[test]
    fn category_cells() {
        let schema = FeatureSchema::hart();
        let gender = &schema.features[1];
        assert_eq!(gender.parse_cell("Male"), Ok(1.0));
        assert_eq!(gender.parse_cell("Unknown"), Ok(2.0));
        let binary = &schema.features[3];
        assert_eq!(binary.parse_cell("yes"), Ok(1.0));
        assert!(binary.parse_cell("maybe").is_err());
        let count = &schema.features[2];
        assert!(count.parse_cell("1.5").is_err());
        assert!(count.parse_cell("-1").is_err());
    }
}
