//! Line-oriented pre-order text format for trees.
//!
//! ```text
//! tree v1 labels=3 nodes=5
//! split 0 le 30.5
//! leaf 4 1 0
//! split 5 in 0,3,7
//! leaf 0 2 2
//! leaf 1 0 6
//! ```

use std::fmt::Write;

use super::{Node, Predicate, SplitRule, Tree};
use crate::error::{Error, Result};

pub const TREE_FORMAT_VERSION: u32 = 1;

impl Tree {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out);
        out
    }

    pub(crate) fn write_text(&self, out: &mut String) {
        writeln!(out, "tree v{TREE_FORMAT_VERSION} labels={} nodes={}", self.n_labels, self.nodes.len()).unwrap();
        for node in &self.nodes {
            match node {
                Node::Split { rule, .. } => match &rule.predicate {
                    Predicate::Threshold(t) => writeln!(out, "split {} le {t}", rule.feature).unwrap(),
                    Predicate::Subset(codes) => {
                        let codes: Vec<String> = codes.iter().map(u32::to_string).collect();
                        writeln!(out, "split {} in {}", rule.feature, codes.join(",")).unwrap();
                    }
                },
                Node::Leaf { weights } => {
                    let weights: Vec<String> = weights.iter().map(f64::to_string).collect();
                    writeln!(out, "leaf {}", weights.join(" ")).unwrap();
                }
            }
        }
    }

    pub fn from_text(text: &str) -> Result<Tree> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let tree = parse_tree(&mut lines)?;
        if let Some((line, rest)) = lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(format_error(line, format!("trailing content `{rest}`")));
        }
        Ok(tree)
    }
}

fn format_error(line: usize, message: impl Into<String>) -> Error {
    Error::Format { what: "tree", line, message: message.into() }
}

fn header_field(token: Option<&str>, key: &str, line: usize) -> Result<usize> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_error(line, format!("expected `{key}=<n>`")))
}

/// Parse one tree starting at the next line of `lines`.
pub(crate) fn parse_tree<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Tree> {
    let (line, header) = lines.next().ok_or_else(|| format_error(0, "missing tree header"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("tree") {
        return Err(format_error(line, "expected `tree` header"));
    }
    let version = tokens.next().unwrap_or("");
    if version != format!("v{TREE_FORMAT_VERSION}") {
        return Err(format_error(line, format!("unsupported tree format `{version}`")));
    }
    let n_labels = header_field(tokens.next(), "labels", line)?;
    let n_nodes = header_field(tokens.next(), "nodes", line)?;
    if n_nodes == 0 {
        return Err(format_error(line, "a tree needs at least one node"));
    }

    let mut parsed = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (line, text) = lines.next().ok_or_else(|| format_error(line, "tree ends early"))?;
        parsed.push((line, parse_node(line, text, n_labels)?));
    }

    // Resolve child links from the pre-order layout.
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut cursor = 0;
    link(&parsed, &mut cursor, &mut nodes)?;
    if cursor != n_nodes {
        return Err(format_error(parsed[cursor].0, "node list has unreachable entries"));
    }
    Ok(Tree::from_nodes(nodes, n_labels))
}

enum RawNode {
    Split(SplitRule),
    Leaf(Vec<f64>),
}

fn parse_node(line: usize, text: &str, n_labels: usize) -> Result<RawNode> {
    let mut tokens = text.split_whitespace();
    match tokens.next() {
        Some("leaf") => {
            let weights: Vec<f64> = tokens
                .map(|t| t.parse::<f64>().map_err(|_| format_error(line, format!("bad weight `{t}`"))))
                .collect::<Result<_>>()?;
            if weights.len() != n_labels {
                return Err(format_error(line, format!("leaf has {} weights, expected {n_labels}", weights.len())));
            }
            if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
                return Err(format_error(line, "leaf weights must be nonnegative with a positive sum"));
            }
            Ok(RawNode::Leaf(weights))
        }
        Some("split") => {
            let feature = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| format_error(line, "bad feature index"))?;
            let predicate = match (tokens.next(), tokens.next()) {
                (Some("le"), Some(t)) => {
                    Predicate::Threshold(t.parse().map_err(|_| format_error(line, format!("bad threshold `{t}`")))?)
                }
                (Some("in"), Some(codes)) => {
                    let mut codes: Vec<u32> = codes
                        .split(',')
                        .map(|c| c.parse().map_err(|_| format_error(line, format!("bad category code `{c}`"))))
                        .collect::<Result<_>>()?;
                    codes.sort_unstable();
                    codes.dedup();
                    Predicate::Subset(codes)
                }
                _ => return Err(format_error(line, "expected `le <threshold>` or `in <codes>`")),
            };
            Ok(RawNode::Split(SplitRule { feature, predicate }))
        }
        _ => Err(format_error(line, format!("unrecognized node `{text}`"))),
    }
}

fn link(parsed: &[(usize, RawNode)], cursor: &mut usize, nodes: &mut Vec<Node>) -> Result<usize> {
    let Some((_, raw)) = parsed.get(*cursor) else {
        let line = parsed.last().map_or(0, |p| p.0);
        return Err(format_error(line, "split node is missing a child"));
    };
    *cursor += 1;
    let id = nodes.len();
    match raw {
        RawNode::Leaf(weights) => nodes.push(Node::Leaf { weights: weights.clone() }),
        RawNode::Split(rule) => {
            nodes.push(Node::Leaf { weights: Vec::new() });
            let left = link(parsed, cursor, nodes)?;
            let right = link(parsed, cursor, nodes)?;
            nodes[id] = Node::Split { rule: rule.clone(), left, right };
        }
    }
    Ok(id)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "tree v1 labels=3 nodes=5\n\
                          split 0 le 30.5\n\
                          leaf 4 1 0\n\
                          split 5 in 0,3,7\n\
                          leaf 0 2 2\n\
                          leaf 1 0 6\n";

    #[test]
    fn parses_and_round_trips() {
        let tree = Tree::from_text(SAMPLE).unwrap();
        assert_eq!(tree.nodes().len(), 5);
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.to_text(), SAMPLE);
        let row = [40.0, 0.0, 0.0, 0.0, 0.0, 3.0];
        // Leaf `0 2 2` ties; trees break toward the later label.
        assert_eq!(tree.vote(&row), 2);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(Tree::from_text("tree v2 labels=3 nodes=1\nleaf 1 0 0\n").is_err());
        assert!(Tree::from_text("tree v1 labels=3 nodes=2\nsplit 0 le 1\nleaf 1 0 0\n").is_err());
        assert!(Tree::from_text("tree v1 labels=3 nodes=1\nleaf 1 0\n").is_err());
        assert!(Tree::from_text("tree v1 labels=3 nodes=1\nleaf 0 0 0\n").is_err());
        assert!(Tree::from_text("tree v1 labels=3 nodes=1\nleaf 1 0 0\nleaf 1 0 0\n").is_err());
        let err = Tree::from_text("tree v1 labels=2 nodes=3\nsplit 0 xx 1\nleaf 1 0\nleaf 0 1\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
