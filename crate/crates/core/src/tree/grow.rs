use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Node, Predicate, SplitRule, Tree, TreeParams};
use crate::data::{Dataset, FeatureKind};
use crate::error::{Error, Result};

/// Above this many categories present at a node, subsets are not enumerated;
/// categories are ordered by their first-label weight fraction instead and
/// only prefixes of that order are tried.
const MAX_ENUMERATED_CATEGORIES: usize = 12;

/// Gains within this fraction of the node weight count as ties.
const GAIN_TOLERANCE: f64 = 1e-12;

/// Train one tree on `rows` of `data` (duplicates allowed, as in a bootstrap).
pub fn train_tree(
    data: &Dataset,
    rows: &[usize],
    class_weights: &[f64],
    params: &TreeParams,
    seed: u64,
) -> Result<Tree> {
    check_inputs(data, rows, class_weights, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(grow(data, rows.to_vec(), class_weights, params, &mut rng))
}

pub(crate) fn check_inputs(data: &Dataset, rows: &[usize], class_weights: &[f64], params: &TreeParams) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("cannot train on zero rows"));
    }
    if rows.iter().any(|&r| r >= data.n_rows()) {
        return Err(Error::invalid("row index out of range"));
    }
    if class_weights.len() != data.schema().n_labels() {
        return Err(Error::invalid(format!(
            "{} class weights for {} labels",
            class_weights.len(),
            data.schema().n_labels()
        )));
    }
    if class_weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::invalid("class weights must be positive and finite"));
    }
    let m = params.features_per_node(data.n_features());
    if m == 0 || m > data.n_features() {
        return Err(Error::invalid(format!("features per node {m} outside 1..={}", data.n_features())));
    }
    if params.min_leaf == 0 || params.max_depth == 0 {
        return Err(Error::invalid("min_leaf and max_depth must be at least 1"));
    }
    Ok(())
}

pub(crate) fn grow(
    data: &Dataset,
    rows: Vec<usize>,
    class_weights: &[f64],
    params: &TreeParams,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let kinds = data.schema().features.iter().map(|f| f.kind).collect();
    let cardinality = data.schema().features.iter().map(|f| f.cardinality().unwrap_or(0)).collect();
    let mut grower = Grower {
        data,
        class_weights,
        params,
        kinds,
        cardinality,
        m: params.features_per_node(data.n_features()),
        n_labels: data.schema().n_labels(),
        rng,
        nodes: Vec::new(),
    };
    grower.build(rows, 0);
    Tree::from_nodes(grower.nodes, data.schema().n_labels())
}

/// Sum over classes of `w_c^2 / W`; the weighted Gini impurity of a node is
/// `W - score`, so a split's impurity decrease is `score(L) + score(R) - score(P)`.
fn score(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        0.0
    } else {
        weights.iter().map(|w| w * w).sum::<f64>() / total
    }
}

struct Candidate {
    gain: f64,
    feature: usize,
    predicate: Predicate,
}

struct Grower<'a> {
    data: &'a Dataset,
    class_weights: &'a [f64],
    params: &'a TreeParams,
    kinds: Vec<FeatureKind>,
    cardinality: Vec<usize>,
    m: usize,
    n_labels: usize,
    rng: &'a mut ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Grower<'_> {
    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let mut totals = vec![0.0; self.n_labels];
        for &r in &rows {
            let label = self.data.label(r);
            totals[label] += self.class_weights[label];
        }
        let id = self.nodes.len();
        let pure = totals.iter().filter(|&&w| w > 0.0).count() <= 1;
        let splittable = depth < self.params.max_depth && !pure && rows.len() >= 2 * self.params.min_leaf;
        self.nodes.push(Node::Leaf { weights: totals.clone() });
        if !splittable {
            return id;
        }

        let mut features = index::sample(self.rng, self.data.n_features(), self.m).into_vec();
        features.sort_unstable();
        let total_weight: f64 = totals.iter().sum();
        let tolerance = GAIN_TOLERANCE * total_weight;
        let parent = score(&totals);

        let mut best: Option<Candidate> = None;
        for f in features {
            let candidate = if self.kinds[f].is_ordered() {
                self.best_threshold(f, &rows, &totals, parent, tolerance)
            } else {
                self.best_subset(f, &rows, &totals, parent, tolerance)
            };
            if let Some(c) = candidate {
                if c.gain > tolerance && best.as_ref().is_none_or(|b| c.gain > b.gain + tolerance) {
                    best = Some(c);
                }
            }
        }
        let Some(best) = best else { return id };

        let rule = SplitRule { feature: best.feature, predicate: best.predicate };
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) =
            rows.into_iter().partition(|&r| rule.goes_left(self.data.row(r)));
        let left = self.build(left_rows, depth + 1);
        let right = self.build(right_rows, depth + 1);
        self.nodes[id] = Node::Split { rule, left, right };
        id
    }

    fn best_threshold(&self, f: usize, rows: &[usize], totals: &[f64], parent: f64, tol: f64) -> Option<Candidate> {
        let mut pairs: Vec<(f64, usize)> = rows.iter().map(|&r| (self.data.value(r, f), self.data.label(r))).collect();
        pairs.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let n = pairs.len();
        let min_leaf = self.params.min_leaf;
        let mut left = vec![0.0; self.n_labels];
        let mut right = vec![0.0; self.n_labels];
        let mut best: Option<Candidate> = None;
        for i in 0..n - 1 {
            let (value, label) = pairs[i];
            left[label] += self.class_weights[label];
            let next = pairs[i + 1].0;
            if value == next || i + 1 < min_leaf || n - i - 1 < min_leaf {
                continue;
            }
            for c in 0..self.n_labels {
                right[c] = totals[c] - left[c];
            }
            let gain = score(&left) + score(&right) - parent;
            if best.as_ref().is_none_or(|b| gain > b.gain + tol) {
                best = Some(Candidate { gain, feature: f, predicate: Predicate::Threshold(midpoint(value, next)) });
            }
        }
        best
    }

    fn best_subset(&self, f: usize, rows: &[usize], totals: &[f64], parent: f64, tol: f64) -> Option<Candidate> {
        let k = self.n_labels;
        let cardinality = self.cardinality[f];
        let mut weights = vec![0.0; cardinality * k];
        let mut counts = vec![0usize; cardinality];
        for &r in rows {
            let code = self.data.value(r, f) as usize;
            let label = self.data.label(r);
            weights[code * k + label] += self.class_weights[label];
            counts[code] += 1;
        }
        let present: Vec<usize> = (0..cardinality).filter(|&c| counts[c] > 0).collect();
        if present.len() < 2 {
            return None;
        }
        let n = rows.len();
        let min_leaf = self.params.min_leaf;
        let mut best: Option<(f64, Vec<u32>)> = None;
        let consider = |subset: Vec<u32>, best: &mut Option<(f64, Vec<u32>)>| {
            let mut left = vec![0.0; k];
            let mut n_left = 0;
            for &c in &subset {
                let c = c as usize;
                n_left += counts[c];
                for (l, w) in left.iter_mut().zip(&weights[c * k..(c + 1) * k]) {
                    *l += w;
                }
            }
            if n_left < min_leaf || n - n_left < min_leaf {
                return;
            }
            let right: Vec<f64> = totals.iter().zip(&left).map(|(t, l)| t - l).collect();
            let gain = score(&left) + score(&right) - parent;
            let better = match best {
                None => true,
                Some((g, s)) => gain > *g + tol || ((gain - *g).abs() <= tol && subset < *s),
            };
            if better {
                *best = Some((gain, subset));
            }
        };

        if present.len() <= MAX_ENUMERATED_CATEGORIES {
            // Every subset containing the first present category; its
            // complement describes the same partition.
            let rest = &present[1..];
            for mask in 0..(1u32 << rest.len()) - 1 {
                let mut subset = vec![present[0] as u32];
                subset.extend(rest.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &c)| c as u32));
                consider(subset, &mut best);
            }
        } else {
            let fraction = |c: usize| {
                let total: f64 = weights[c * k..(c + 1) * k].iter().sum();
                weights[c * k] / total
            };
            let mut order = present.clone();
            order.sort_by(|&a, &b| fraction(a).total_cmp(&fraction(b)).then(a.cmp(&b)));
            for j in 1..order.len() {
                let mut subset: Vec<u32> = order[..j].iter().map(|&c| c as u32).collect();
                subset.sort_unstable();
                consider(subset, &mut best);
            }
        }
        best.map(|(gain, subset)| Candidate { gain, feature: f, predicate: Predicate::Subset(subset) })
    }
}

/// Threshold separating `low < high` such that `low <= t < high`.
fn midpoint(low: f64, high: f64) -> f64 {
    if high == f64::INFINITY {
        return low;
    }
    let mid = low + (high - low) / 2.0;
    if mid >= high {
        low
    } else {
        mid
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{FeatureSchema, FeatureSpec, Record, Sentinel};

    fn numeric_data(rows: &[(f64, usize)]) -> Dataset {
        let schema =
            FeatureSchema::new(vec![FeatureSpec::numeric("x").with_sentinel(Sentinel::NullAllowed)], vec!["a".into(), "b".into()], None).unwrap();
        let rows = rows.iter().map(|&(x, label)| Record { values: vec![x], label, group: None }).collect();
        Dataset::from_rows(schema, rows, "t").unwrap()
    }

    fn params(min_leaf: usize) -> TreeParams {
        TreeParams { max_features: None, min_leaf, max_depth: 16 }
    }

    #[test]
    fn pure_node_is_a_leaf() {
        let data = numeric_data(&[(1.0, 1), (2.0, 1), (3.0, 1)]);
        let tree = train_tree(&data, &[0, 1, 2], &[1.0, 1.0], &params(1), 0).unwrap();
        assert_eq!(tree.nodes(), &[Node::Leaf { weights: vec![0.0, 3.0] }]);
    }

    #[test]
    fn two_separable_rows() {
        let data = numeric_data(&[(1.0, 0), (5.0, 1)]);
        let tree = train_tree(&data, &[0, 1], &[1.0, 1.0], &params(1), 0).unwrap();
        assert_eq!(tree.depth(), 1);
        match &tree.nodes()[0] {
            Node::Split { rule, .. } => assert_eq!(rule.predicate, Predicate::Threshold(3.0)),
            other => panic!("expected split, got {other:?}"),
        }
        assert_eq!(tree.vote(&[1.0]), 0);
        assert_eq!(tree.vote(&[5.0]), 1);
    }

    #[test]
    fn min_leaf_blocks_small_children() {
        let data = numeric_data(&[(1.0, 0), (2.0, 1), (3.0, 1), (4.0, 1)]);
        let tree = train_tree(&data, &[0, 1, 2, 3], &[1.0, 1.0], &params(2), 0).unwrap();
        // The only legal cut is 2|2, which still improves impurity.
        match &tree.nodes()[0] {
            Node::Split { rule, .. } => assert_eq!(rule.predicate, Predicate::Threshold(2.5)),
            other => panic!("expected split, got {other:?}"),
        }
        let tree = train_tree(&data, &[0, 1, 2, 3], &[1.0, 1.0], &params(3), 0).unwrap();
        assert_eq!(tree.n_leaves(), 1);
    }

    #[test]
    fn class_weights_scale_leaves() {
        let data = numeric_data(&[(1.0, 0), (1.0, 1), (1.0, 1)]);
        let tree = train_tree(&data, &[0, 1, 2], &[4.0, 1.0], &params(1), 0).unwrap();
        assert_eq!(tree.nodes(), &[Node::Leaf { weights: vec![4.0, 2.0] }]);
        assert_eq!(tree.vote(&[1.0]), 0);
    }

    #[test]
    fn infinite_values_split_below_infinity() {
        let data = numeric_data(&[(1.0, 0), (2.0, 0), (f64::INFINITY, 1)]);
        let tree = train_tree(&data, &[0, 1, 2], &[1.0, 1.0], &params(1), 0).unwrap();
        match &tree.nodes()[0] {
            Node::Split { rule, .. } => assert_eq!(rule.predicate, Predicate::Threshold(2.0)),
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn categorical_split_picks_separating_subset() {
        let schema = FeatureSchema::new(
            vec![FeatureSpec::categorical("c", &["a", "b", "c"])],
            vec!["x".into(), "y".into()],
            None,
        )
        .unwrap();
        let rows = [(0.0, 1), (1.0, 0), (2.0, 1), (3.0, 0)]
            .iter()
            .map(|&(c, l)| Record { values: vec![c], label: l, group: None })
            .collect();
        let data = Dataset::from_rows(schema, rows, "t").unwrap();
        let tree = train_tree(&data, &[0, 1, 2, 3], &[1.0, 1.0], &params(1), 0).unwrap();
        match &tree.nodes()[0] {
            Node::Split { rule, .. } => assert_eq!(rule.predicate, Predicate::Subset(vec![0, 2])),
            other => panic!("expected split, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let data = numeric_data(&[(1.0, 0), (2.0, 1)]);
        assert!(train_tree(&data, &[], &[1.0, 1.0], &params(1), 0).is_err());
        assert!(train_tree(&data, &[0, 5], &[1.0, 1.0], &params(1), 0).is_err());
        assert!(train_tree(&data, &[0, 1], &[1.0], &params(1), 0).is_err());
        assert!(train_tree(&data, &[0, 1], &[1.0, 0.0], &params(1), 0).is_err());
        assert!(train_tree(&data, &[0, 1], &[1.0, 1.0], &params(0), 0).is_err());
        let too_many = TreeParams { max_features: Some(2), ..params(1) };
        assert!(train_tree(&data, &[0, 1], &[1.0, 1.0], &too_many, 0).is_err());
    }

    #[test]
    fn midpoint_stays_below_high() {
        assert_eq!(midpoint(1.0, 3.0), 2.0);
        let low = 1.0f64;
        let high = f64::from_bits(low.to_bits() + 1);
        assert!(midpoint(low, high) < high);
        assert_eq!(midpoint(4.0, f64::INFINITY), 4.0);
    }
}
