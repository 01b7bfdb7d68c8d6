//! k-anonymity measurement over quasi-identifier columns.

use std::collections::HashMap;
use std::hash::Hash;

use super::dataset::Dataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Cell<'a> {
    Value(u64),
    Text(&'a str),
}

#[derive(Debug, Clone, Copy)]
enum Column {
    Feature(usize),
    Label,
    Group,
}

/// Size summary of the quasi-identifier equivalence classes of a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnonymityProfile {
    pub k: usize,
    pub n_classes: usize,
    /// Rows belonging to a class of size exactly `k`.
    pub rows_at_k: usize,
}

/// Smallest number of rows sharing one quasi-identifier combination.
/// `None` for an empty input.
pub fn min_class_size<K, I>(keys: I) -> Option<usize>
where
    K: Hash + Eq,
    I: IntoIterator<Item = K>,
{
    class_sizes(keys).into_values().min()
}

fn class_sizes<K: Hash + Eq, I: IntoIterator<Item = K>>(keys: I) -> HashMap<K, usize> {
    let mut sizes = HashMap::new();
    for key in keys {
        *sizes.entry(key).or_insert(0) += 1;
    }
    sizes
}

fn resolve(table: &Dataset, quasi_identifiers: &[&str]) -> Result<Vec<Column>> {
    if quasi_identifiers.is_empty() {
        return Err(Error::invalid("at least one quasi-identifier is required"));
    }
    let schema = table.schema();
    quasi_identifiers
        .iter()
        .map(|&name| {
            if let Some(i) = schema.feature_index(name) {
                Ok(Column::Feature(i))
            } else if name == schema.label_column {
                Ok(Column::Label)
            } else if schema.group_attribute.as_deref() == Some(name) {
                Ok(Column::Group)
            } else {
                Err(Error::invalid(format!("quasi-identifier `{name}` is not a column of the table")))
            }
        })
        .collect()
}

fn row_keys<'a>(table: &'a Dataset, columns: &'a [Column]) -> impl Iterator<Item = Vec<Cell<'a>>> + 'a {
    (0..table.n_rows()).map(move |i| {
        columns
            .iter()
            .map(|c| match *c {
                Column::Feature(j) => Cell::Value(table.value(i, j).to_bits()),
                Column::Label => Cell::Value(table.label(i) as u64),
                Column::Group => Cell::Text(table.group(i).unwrap_or("")),
            })
            .collect()
    })
}

/// The k for which `table` is k-anonymous with respect to `quasi_identifiers`.
pub fn k_anonymity(table: &Dataset, quasi_identifiers: &[&str]) -> Result<usize> {
    Ok(anonymity_profile(table, quasi_identifiers)?.k)
}

pub fn anonymity_profile(table: &Dataset, quasi_identifiers: &[&str]) -> Result<AnonymityProfile> {
    let columns = resolve(table, quasi_identifiers)?;
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let sizes = class_sizes(row_keys(table, &columns));
    let k = sizes.values().copied().min().expect("nonempty table has a class");
    let rows_at_k = sizes.values().filter(|&&s| s == k).sum();
    Ok(AnonymityProfile { k, n_classes: sizes.len(), rows_at_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::dataset::Record;
    use crate::data::schema::{FeatureSchema, FeatureSpec};

    fn table(rows: &[[f64; 2]]) -> Dataset {
        let schema = FeatureSchema::new(
            vec![FeatureSpec::numeric("age"), FeatureSpec::categorical("area", &["n", "s"])],
            vec!["a".into(), "b".into()],
            Some("group".into()),
        )
        .unwrap();
        let rows = rows
            .iter()
            .map(|r| Record { values: r.to_vec(), label: 0, group: Some("g".into()) })
            .collect();
        Dataset::from_rows(schema, rows, "t").unwrap()
    }

    #[test]
    fn identical_rows() {
        let t = table(&[[30.0, 1.0]; 8]);
        assert_eq!(k_anonymity(&t, &["age"]).unwrap(), 8);
        assert_eq!(k_anonymity(&t, &["age", "area", "label", "group"]).unwrap(), 8);
    }

    #[test]
    fn singleton_forces_one() {
        let t = table(&[[30.0, 1.0], [30.0, 1.0], [31.0, 1.0]]);
        assert_eq!(k_anonymity(&t, &["age"]).unwrap(), 1);
        assert_eq!(k_anonymity(&t, &["area"]).unwrap(), 3);
        let profile = anonymity_profile(&t, &["age"]).unwrap();
        assert_eq!(profile, AnonymityProfile { k: 1, n_classes: 2, rows_at_k: 1 });
    }

    #[test]
    fn errors() {
        let t = table(&[[1.0, 0.0]]);
        assert!(k_anonymity(&t, &[]).is_err());
        assert!(k_anonymity(&t, &["nope"]).is_err());
        let empty = t.subset(&[]);
        assert!(matches!(k_anonymity(&empty, &["age"]), Err(Error::EmptyTable)));
    }

    #[test]
    fn generic_helper() {
        assert_eq!(min_class_size(["a", "b", "a"]), Some(1));
        assert_eq!(min_class_size(Vec::<u8>::new()), None);
    }
}
