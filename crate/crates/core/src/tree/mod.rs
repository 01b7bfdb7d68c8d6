//! Classification trees: greedy weighted-Gini induction and root-to-leaf
//! prediction.

mod grow;
mod text;

use serde::{Deserialize, Serialize};

pub use grow::train_tree;
pub(crate) use grow::{check_inputs, grow};
pub(crate) use text::parse_tree;

/// Depth, leaf-size and feature-sampling limits for one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Features sampled at each node; `None` means `ceil(sqrt(p))`.
    pub max_features: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_features: None, min_leaf: 5, max_depth: 16 }
    }
}

impl TreeParams {
    pub fn features_per_node(&self, n_features: usize) -> usize {
        self.max_features.unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// Go left iff `value <= threshold`.
    Threshold(f64),
    /// Go left iff the category code is in the (sorted) set.
    Subset(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitRule {
    pub feature: usize,
    pub predicate: Predicate,
}

impl SplitRule {
    pub fn goes_left(&self, row: &[f64]) -> bool {
        let value = row[self.feature];
        match &self.predicate {
            Predicate::Threshold(t) => value <= *t,
            Predicate::Subset(codes) => codes.binary_search(&(value as u32)).is_ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Split { rule: SplitRule, left: usize, right: usize },
    /// Class-weighted training counts that reached this leaf.
    Leaf { weights: Vec<f64> },
}

/// A trained tree. Nodes are stored in pre-order with the root at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    n_labels: usize,
}

impl Tree {
    pub(crate) fn from_nodes(nodes: Vec<Node>, n_labels: usize) -> Self {
        debug_assert!(!nodes.is_empty());
        Tree { nodes, n_labels }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Raw class weights of the leaf `row` reaches.
    pub fn leaf_weights(&self, row: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { weights } => return weights,
                Node::Split { rule, left, right } => i = if rule.goes_left(row) { *left } else { *right },
            }
        }
    }

    /// Leaf class distribution for `row`, normalized to sum to 1.
    pub fn predict(&self, row: &[f64]) -> Vec<f64> {
        let weights = self.leaf_weights(row);
        let total: f64 = weights.iter().sum();
        weights.iter().map(|w| w / total).collect()
    }

    /// The tree's vote: the label with the largest leaf weight, ties going to
    /// the later (lower-risk) label.
    pub fn vote(&self, row: &[f64]) -> usize {
        let weights = self.leaf_weights(row);
        let mut best = 0;
        for (i, &w) in weights.iter().enumerate() {
            if w >= weights[best] {
                best = i;
            }
        }
        best
    }
}

/// Normalized leaf distribution of `tree` for `row`.
pub fn predict_tree(tree: &Tree, row: &[f64]) -> Vec<f64> {
    tree.predict(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump() -> Tree {
        Tree::from_nodes(
            vec![
                Node::Split { rule: SplitRule { feature: 0, predicate: Predicate::Threshold(30.0) }, left: 1, right: 2 },
                Node::Leaf { weights: vec![3.0, 1.0] },
                Node::Leaf { weights: vec![1.0, 1.0] },
            ],
            2,
        )
    }

    #[test]
    fn sentinel_routes_right() {
        let tree = stump();
        assert_eq!(tree.predict(&[100.0]), vec![0.5, 0.5]);
        assert_eq!(tree.predict(&[30.0]), vec![0.75, 0.25]);
        assert_eq!(tree.predict(&[f64::INFINITY]), vec![0.5, 0.5]);
    }

    #[test]
    fn vote_ties_go_to_lower_risk() {
        let tree = stump();
        assert_eq!(tree.vote(&[10.0]), 0);
        assert_eq!(tree.vote(&[50.0]), 1);
    }

    #[test]
    fn subset_predicate() {
        let rule = SplitRule { feature: 1, predicate: Predicate::Subset(vec![0, 3]) };
        assert!(rule.goes_left(&[0.0, 3.0]));
        assert!(!rule.goes_left(&[0.0, 2.0]));
    }

    #[test]
    fn single_leaf() {
        let tree = Tree::from_nodes(vec![Node::Leaf { weights: vec![0.0, 2.0, 6.0] }], 3);
        assert_eq!(tree.predict(&[1.0, 2.0]), vec![0.0, 0.25, 0.75]);
        assert_eq!(tree.depth(), 0);
        assert_eq!(stump().depth(), 1);
    }
}
