//! Brute-force reference implementations and random instance generators
//! shared by the property suites.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use riskforest_core::data::{FeatureKind, FeatureSchema, FeatureSpec, Record};
use riskforest_core::fairness::GroupedOutcomes;
use riskforest_core::tree::Predicate;
use riskforest_core::Dataset;

// Exhaustive greedy tree builder.

/// Label count of the random tree datasets.
pub const LABELS: usize = 3;

pub enum OracleNode {
    Leaf(Vec<f64>),
    Split { feature: usize, predicate: Predicate, left: Box<OracleNode>, right: Box<OracleNode> },
}

pub fn goes_left(predicate: &Predicate, x: f64) -> bool {
    match predicate {
        Predicate::Threshold(t) => x <= *t,
        Predicate::Subset(s) => s.contains(&(x as u32)),
    }
}

/// `W * (1 - sum p^2)`.
pub fn impurity(w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    total * (1.0 - w.iter().map(|x| (x / total).powi(2)).sum::<f64>())
}

pub fn class_totals(data: &Dataset, rows: &[usize], weights: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; LABELS];
    for &r in rows {
        t[data.label(r)] += weights[data.label(r)];
    }
    t
}

pub fn subsets(present: &[u32]) -> Vec<Vec<u32>> {
    let (first, rest) = present.split_first().unwrap();
    let mut out = Vec::new();
    for mask in 0..(1u32 << rest.len()) - 1 {
        let mut s = vec![*first];
        for (i, c) in rest.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s.push(*c);
            }
        }
        out.push(s);
    }
    out
}

pub fn candidates(data: &Dataset, rows: &[usize], feature: usize) -> Vec<Predicate> {
    let mut values: Vec<f64> = rows.iter().map(|&r| data.value(r, feature)).collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    if data.schema().features[feature].kind.is_ordered() {
        values
            .windows(2)
            .map(|w| Predicate::Threshold(if w[1].is_infinite() { w[0] } else { (w[0] + w[1]) / 2.0 }))
            .collect()
    } else if values.len() < 2 {
        Vec::new()
    } else {
        let present: Vec<u32> = values.iter().map(|&v| v as u32).collect();
        subsets(&present).into_iter().map(Predicate::Subset).collect()
    }
}

pub fn build(data: &Dataset, rows: Vec<usize>, weights: &[f64], min_leaf: usize, depth: usize, max_depth: usize) -> OracleNode {
    let totals = class_totals(data, &rows, weights);
    let pure = totals.iter().filter(|&&w| w > 0.0).count() <= 1;
    if depth >= max_depth || pure || rows.len() < 2 * min_leaf {
        return OracleNode::Leaf(totals);
    }
    let w: f64 = totals.iter().sum();
    let parent = impurity(&totals);

    // (gain, feature, predicate) for every admissible split.
    let mut all = Vec::new();
    for f in 0..data.n_features() {
        for p in candidates(data, &rows, f) {
            let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&row| goes_left(&p, data.value(row, f)));
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let gain = parent - impurity(&class_totals(data, &l, weights)) - impurity(&class_totals(data, &r, weights));
            all.push((gain, f, p));
        }
    }
    let tol = 1e-12 * w;
    let Some(max) = all.iter().map(|c| c.0).reduce(f64::max) else {
        return OracleNode::Leaf(totals);
    };
    if max <= tol {
        return OracleNode::Leaf(totals);
    }
    let (_, feature, predicate) = all
        .into_iter()
        .filter(|c| c.0 >= max - 2.0 * tol)
        .min_by(|a, b| {
            a.1.cmp(&b.1).then_with(|| match (&a.2, &b.2) {
                (Predicate::Threshold(x), Predicate::Threshold(y)) => x.total_cmp(y),
                (Predicate::Subset(x), Predicate::Subset(y)) => x.cmp(y),
                _ => unreachable!(),
            })
        })
        .unwrap();
    let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&row| goes_left(&predicate, data.value(row, feature)));
    OracleNode::Split {
        feature,
        predicate,
        left: Box::new(build(data, l, weights, min_leaf, depth + 1, max_depth)),
        right: Box::new(build(data, r, weights, min_leaf, depth + 1, max_depth)),
    }
}

pub fn oracle_predict(node: &OracleNode, row: &[f64]) -> Vec<f64> {
    match node {
        OracleNode::Leaf(w) => {
            let total: f64 = w.iter().sum();
            w.iter().map(|x| x / total).collect()
        }
        OracleNode::Split { feature, predicate, left, right } => {
            if goes_left(predicate, row[*feature]) {
                oracle_predict(left, row)
            } else {
                oracle_predict(right, row)
            }
        }
    }
}

pub fn schema() -> FeatureSchema {
    let features = vec![
        FeatureSpec::numeric("a"),
        FeatureSpec::count("b"),
        FeatureSpec::categorical("c", &["x", "y", "z"]),
        FeatureSpec::binary("d"),
        FeatureSpec::years_since("e"),
    ];
    FeatureSchema::new(features, vec!["H".into(), "M".into(), "L".into()], None).unwrap()
}

pub fn random_value(kind: FeatureKind, rng: &mut ChaCha8Rng) -> f64 {
    match kind {
        FeatureKind::Numeric => rng.random_range(0..8) as f64 * 0.5,
        FeatureKind::Count => rng.random_range(0..4) as f64,
        FeatureKind::Categorical => rng.random_range(0..4) as f64,
        FeatureKind::Binary => rng.random_range(0..2) as f64,
        FeatureKind::YearsSince => [0.5, 2.0, 7.0, 100.0][rng.random_range(0..4)],
    }
}

pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize) -> Dataset {
    let schema = schema();
    let rows = (0..n)
        .map(|_| Record {
            values: schema.features.iter().map(|f| random_value(f.kind, rng)).collect(),
            label: rng.random_range(0..LABELS),
            group: None,
        })
        .collect();
    Dataset::from_rows(schema, rows, "random").unwrap()
}

// Pair-counting AUC.

/// Share of (positive, negative) pairs where the positive scores higher,
/// ties counted half.
pub fn pair_auc(scores: &[f64], actual: &[bool]) -> f64 {
    let (mut good, mut pairs) = (0.0, 0.0);
    for (i, &a) in actual.iter().enumerate() {
        if !a {
            continue;
        }
        for (j, &b) in actual.iter().enumerate() {
            if b {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                good += 1.0;
            } else if scores[i] == scores[j] {
                good += 0.5;
            }
        }
    }
    good / pairs
}

pub fn random_auc_instance(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<bool>) {
    loop {
        // Coarse scores so ties are common.
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..40) as f64 / 40.0).collect();
        let actual: Vec<bool> = scores.iter().map(|s| rng.random::<f64>() < 0.2 + 0.6 * s).collect();
        if actual.iter().any(|&a| a) && actual.iter().any(|&a| !a) {
            return (scores, actual);
        }
    }
}

// Quadratic k-anonymity.

pub const COLUMNS: [&str; 5] = ["age", "area", "prior", "flag", "group"];

pub fn random_kanon_table(rng: &mut ChaCha8Rng) -> Dataset {
    let schema = FeatureSchema::new(
        vec![
            FeatureSpec::numeric("age"),
            FeatureSpec::categorical("area", &["n", "s", "e", "w"]),
            FeatureSpec::count("prior"),
            FeatureSpec::binary("flag"),
        ],
        vec!["H".into(), "L".into()],
        Some("group".into()),
    )
    .unwrap();
    let rows = (0..100)
        .map(|_| Record {
            values: vec![
                rng.random_range(18..24) as f64,
                rng.random_range(0..5) as f64,
                rng.random_range(0..3) as f64,
                rng.random_range(0..2) as f64,
            ],
            label: rng.random_range(0..2),
            group: Some(["x", "y"][rng.random_range(0..2)].to_string()),
        })
        .collect();
    Dataset::from_rows(schema, rows, "random").unwrap()
}

pub fn cell(table: &Dataset, row: usize, column: &str) -> String {
    match table.schema().feature_index(column) {
        Some(j) => table.value(row, j).to_string(),
        None => table.group(row).unwrap().to_string(),
    }
}

/// For each row, count rows agreeing on every column; k is the minimum.
pub fn brute_force_k(table: &Dataset, columns: &[&str]) -> usize {
    (0..table.n_rows())
        .map(|i| {
            (0..table.n_rows())
                .filter(|&j| columns.iter().all(|c| cell(table, i, c) == cell(table, j, c)))
                .count()
        })
        .min()
        .unwrap()
}

// Fairness instances.

pub fn random_outcomes(rng: &mut ChaCha8Rng) -> GroupedOutcomes {
    let groups = (0..rng.random_range(2..4))
        .map(|g| {
            let n = rng.random_range(1..30);
            let p = rng.random::<f64>();
            let predicted = (0..n).map(|_| rng.random::<f64>() < p).collect();
            let actual = (0..n).map(|_| rng.random::<f64>() < 0.5).collect();
            (format!("g{g}"), predicted, actual)
        })
        .collect();
    GroupedOutcomes::from_flags(groups).unwrap()
}
