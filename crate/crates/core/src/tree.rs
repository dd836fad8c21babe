//! Decision-tree structure, prediction, rule rendering and JSON
//! persistence.
//!
//! Rendering follows the two classical text layouts: multiway trees
//! print one `attr = value` arc per line with `| ` indentation and
//! `null` for empty branches; binary CART trees print the chosen value
//! subset as `attr=(v)/(w)`, its complement as `attr!=(v)/(w)`, and
//! annotate leaves with `(covered/misclassified)` weights.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{validate_schema, AttributeKind, AttributeSpec, Cell, Instance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    Id3,
    C45,
    Cart,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Id3 => "ID3",
            Algorithm::C45 => "C4.5",
            Algorithm::Cart => "CART",
        }
    }
}

/// Arc label of one branch out of an internal node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Outcome {
    /// Nominal value equality (multiway splits).
    Equals(usize),
    /// Membership in a nominal value subset (binary splits).
    InSubset(BTreeSet<usize>),
    /// Numeric at-most threshold.
    Le(f64),
    /// Numeric above threshold.
    Gt(f64),
}

impl Outcome {
    /// Whether a cell takes this branch. Missing never matches; the
    /// caller applies its algorithm's missing-value rule.
    pub fn matches(&self, cell: &Cell) -> bool {
        match (self, cell) {
            (Outcome::Equals(v), Cell::Nominal(x)) => x == v,
            (Outcome::InSubset(s), Cell::Nominal(x)) => s.contains(x),
            (Outcome::Le(t), Cell::Number(x)) => *x <= *t,
            (Outcome::Gt(t), Cell::Number(x)) => *x > *t,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub outcome: Outcome,
    pub node: Node,
}

/// A class leaf with its training distribution: `dist[c]` is the
/// training weight of class `c` routed here. Covered weight `n` and
/// misclassified weight `e` derive from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub class: usize,
    pub dist: Vec<f64>,
}

impl Leaf {
    /// Majority-class leaf over a distribution; ties take the lowest
    /// class index.
    pub fn majority(dist: Vec<f64>) -> Self {
        let mut class = 0;
        for (i, w) in dist.iter().enumerate() {
            if *w > dist[class] {
                class = i;
            }
        }
        Leaf { class, dist }
    }

    pub fn n(&self) -> f64 {
        self.dist.iter().sum()
    }

    pub fn e(&self) -> f64 {
        self.n() - self.dist[self.class]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Internal {
        attr: usize,
        branches: Vec<Branch>,
    },
    Leaf(Leaf),
    /// Empty training partition; predictions routed here are
    /// unclassified.
    Null,
}

impl Node {
    pub fn leaf(class: usize, dist: Vec<f64>) -> Node {
        Node::Leaf(Leaf { class, dist })
    }

    /// Total training weight of leaves in this subtree.
    pub fn mass(&self) -> f64 {
        match self {
            Node::Internal { branches, .. } => branches.iter().map(|b| b.node.mass()).sum(),
            Node::Leaf(leaf) => leaf.n(),
            Node::Null => 0.0,
        }
    }

    /// Adds this subtree's per-class training weights into `acc`.
    pub fn class_mass_into(&self, acc: &mut [f64]) {
        match self {
            Node::Internal { branches, .. } => {
                for b in branches {
                    b.node.class_mass_into(acc);
                }
            }
            Node::Leaf(leaf) => {
                for (a, w) in acc.iter_mut().zip(&leaf.dist) {
                    *a += w;
                }
            }
            Node::Null => {}
        }
    }

    fn count(&self, internal: &mut usize, leaves: &mut usize) {
        match self {
            Node::Internal { branches, .. } => {
                *internal += 1;
                for b in branches {
                    b.node.count(internal, leaves);
                }
            }
            Node::Leaf(_) | Node::Null => *leaves += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Class(usize),
    Unclassified,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    algorithm: Algorithm,
    schema: Vec<AttributeSpec>,
    class_index: usize,
    root: Node,
}

impl DecisionTree {
    pub fn new(
        algorithm: Algorithm,
        schema: Vec<AttributeSpec>,
        class_index: usize,
        root: Node,
    ) -> Result<Self> {
        validate_schema(&schema, class_index)?;
        validate_node(&root, &schema, class_index, algorithm)?;
        Ok(DecisionTree {
            algorithm,
            schema,
            class_index,
            root,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn schema(&self) -> &[AttributeSpec] {
        &self.schema
    }

    pub fn class_index(&self) -> usize {
        self.class_index
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn class_labels(&self) -> &[String] {
        self.schema[self.class_index].values()
    }

    /// Label text of a prediction, if classified.
    pub fn label_of(&self, p: Prediction) -> Option<&str> {
        match p {
            Prediction::Class(c) => Some(&self.class_labels()[c]),
            Prediction::Unclassified => None,
        }
    }

    /// Routes an instance to a prediction. The class cell may be
    /// missing. Missing test values follow the algorithm's rule:
    /// ID3 gives up, C4.5 descends every branch weighted by training
    /// mass, CART takes the heavier branch.
    pub fn predict(&self, x: &Instance) -> Result<Prediction> {
        x.validate(&self.schema, self.class_index, false)?;
        match self.algorithm {
            Algorithm::C45 => {
                let mut votes = vec![0.0; self.class_labels().len()];
                collect_votes(&self.root, x, 1.0, &mut votes);
                let total: f64 = votes.iter().sum();
                if total <= 0.0 {
                    Ok(Prediction::Unclassified)
                } else {
                    let mut best = 0;
                    for (i, v) in votes.iter().enumerate() {
                        if *v > votes[best] {
                            best = i;
                        }
                    }
                    Ok(Prediction::Class(best))
                }
            }
            _ => Ok(route(&self.root, x, self.algorithm)),
        }
    }

    /// (internal nodes, leaves); null leaves count as leaves.
    pub fn node_count(&self) -> (usize, usize) {
        let (mut internal, mut leaves) = (0, 0);
        self.root.count(&mut internal, &mut leaves);
        (internal, leaves)
    }

    /// Depth-first indented rule text, LF-terminated.
    pub fn render_rules(&self) -> String {
        let mut out = String::new();
        let cart = self.algorithm == Algorithm::Cart;
        match &self.root {
            Node::Leaf(leaf) => {
                out.push(':');
                out.push(' ');
                out.push_str(&self.leaf_suffix(leaf, cart));
                out.push('\n');
            }
            Node::Null => out.push_str(": null\n"),
            _ => self.render_node(&self.root, 0, cart, &mut out),
        }
        out
    }

    fn render_node(&self, node: &Node, depth: usize, cart: bool, out: &mut String) {
        if let Node::Internal { attr, branches } = node {
            // The printed subset of a binary nominal split labels both
            // arcs: "=(..)" then its complement "!=(..)".
            let subset_text = match branches.first().map(|b| &b.outcome) {
                Some(Outcome::InSubset(s)) => Some(self.subset_text(*attr, s)),
                _ => None,
            };
            for (i, branch) in branches.iter().enumerate() {
                let mut line = String::new();
                for _ in 0..depth {
                    line.push_str("| ");
                }
                line.push_str(&self.arc_text(*attr, &branch.outcome, i, subset_text.as_deref()));
                match &branch.node {
                    Node::Leaf(leaf) => {
                        line.push_str(": ");
                        line.push_str(&self.leaf_suffix(leaf, cart));
                        out.push_str(&line);
                        out.push('\n');
                    }
                    Node::Null => {
                        line.push_str(": null");
                        out.push_str(&line);
                        out.push('\n');
                    }
                    child => {
                        out.push_str(&line);
                        out.push('\n');
                        self.render_node(child, depth + 1, cart, out);
                    }
                }
            }
        }
    }

    fn arc_text(
        &self,
        attr: usize,
        outcome: &Outcome,
        index: usize,
        subset: Option<&str>,
    ) -> String {
        let name = &self.schema[attr].name;
        match outcome {
            Outcome::Equals(v) => format!("{name} = {}", self.schema[attr].values()[*v]),
            Outcome::InSubset(s) => {
                let text = match subset {
                    Some(t) => t.to_string(),
                    None => self.subset_text(attr, s),
                };
                if index == 0 {
                    format!("{name}={text}")
                } else {
                    format!("{name}!={text}")
                }
            }
            Outcome::Le(t) => format!("{name} <= {t}"),
            Outcome::Gt(t) => format!("{name} > {t}"),
        }
    }

    fn subset_text(&self, attr: usize, subset: &BTreeSet<usize>) -> String {
        let values = self.schema[attr].values();
        subset
            .iter()
            .map(|v| format!("({})", values[*v]))
            .collect::<Vec<_>>()
            .join("/")
    }

    fn leaf_suffix(&self, leaf: &Leaf, cart: bool) -> String {
        let label = &self.class_labels()[leaf.class];
        if cart {
            format!("{label}({:.1}/{:.1})", leaf.n(), leaf.e())
        } else {
            label.clone()
        }
    }

    /// Versioned, schema-hashed JSON document.
    pub fn to_json(&self) -> String {
        let doc = ModelDocument {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            algorithm: self.algorithm,
            schema_hash: schema_hash(&self.schema, self.class_index),
            schema: self.schema.clone(),
            class_index: self.class_index,
            root: self.root.clone(),
        };
        serde_json::to_string(&doc).expect("model documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<DecisionTree> {
        let doc: ModelDocument =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if doc.format != MODEL_FORMAT {
            return Err(Error::Model(format!(
                "unknown document format '{}'",
                doc.format
            )));
        }
        if doc.version != MODEL_VERSION {
            return Err(Error::Model(format!(
                "unsupported model version {}",
                doc.version
            )));
        }
        let expect = schema_hash(&doc.schema, doc.class_index);
        if doc.schema_hash != expect {
            return Err(Error::SchemaMismatch(format!(
                "stored hash {} does not match schema hash {expect}",
                doc.schema_hash
            )));
        }
        DecisionTree::new(doc.algorithm, doc.schema, doc.class_index, doc.root)
    }
}

/// Single-branch routing (ID3 and CART).
pub(crate) fn route(node: &Node, x: &Instance, algorithm: Algorithm) -> Prediction {
    match node {
        Node::Leaf(leaf) => Prediction::Class(leaf.class),
        Node::Null => Prediction::Unclassified,
        Node::Internal { attr, branches } => {
            let cell = &x.cells[*attr];
            if cell.is_missing() {
                match algorithm {
                    Algorithm::Id3 => Prediction::Unclassified,
                    _ => {
                        // Heavier training branch; ties take the first.
                        let mut best = 0;
                        for (i, b) in branches.iter().enumerate() {
                            if b.node.mass() > branches[best].node.mass() {
                                best = i;
                            }
                        }
                        route(&branches[best].node, x, algorithm)
                    }
                }
            } else {
                match branches.iter().find(|b| b.outcome.matches(cell)) {
                    Some(b) => route(&b.node, x, algorithm),
                    None => Prediction::Unclassified,
                }
            }
        }
    }
}

/// C4.5 routing: weight flows down every branch at a missing test in
/// proportion to training branch mass, and accumulates on leaf classes.
fn collect_votes(node: &Node, x: &Instance, weight: f64, votes: &mut [f64]) {
    match node {
        Node::Leaf(leaf) => votes[leaf.class] += weight,
        Node::Null => {}
        Node::Internal { attr, branches } => {
            let cell = &x.cells[*attr];
            if cell.is_missing() {
                let total: f64 = branches.iter().map(|b| b.node.mass()).sum();
                if total <= 0.0 {
                    return;
                }
                for b in branches {
                    let share = b.node.mass() / total;
                    if share > 0.0 {
                        collect_votes(&b.node, x, weight * share, votes);
                    }
                }
            } else if let Some(b) = branches.iter().find(|b| b.outcome.matches(cell)) {
                collect_votes(&b.node, x, weight, votes);
            }
        }
    }
}

const MODEL_FORMAT: &str = "treelab-tree";
const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    algorithm: Algorithm,
    schema_hash: String,
    schema: Vec<AttributeSpec>,
    class_index: usize,
    root: Node,
}

/// FNV-1a over the canonical schema JSON; stable across platforms.
pub fn schema_hash(schema: &[AttributeSpec], class_index: usize) -> String {
    let canon = serde_json::to_string(&(schema, class_index)).expect("schemas always serialize");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canon.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

fn validate_node(
    node: &Node,
    schema: &[AttributeSpec],
    class_index: usize,
    algorithm: Algorithm,
) -> Result<()> {
    match node {
        Node::Null => Ok(()),
        Node::Leaf(leaf) => {
            let n_classes = schema[class_index].cardinality();
            if leaf.dist.len() != n_classes || leaf.class >= n_classes {
                return Err(Error::Model(
                    "leaf does not match the class attribute".to_string(),
                ));
            }
            if leaf.dist.iter().any(|w| !w.is_finite() || *w < 0.0) {
                return Err(Error::Model(
                    "leaf weights must be finite and non-negative".to_string(),
                ));
            }
            Ok(())
        }
        Node::Internal { attr, branches } => {
            if *attr >= schema.len() || *attr == class_index {
                return Err(Error::Model(format!(
                    "internal node tests invalid attribute {attr}"
                )));
            }
            if branches.len() < 2 {
                return Err(Error::Model(
                    "internal node needs at least two branches".to_string(),
                ));
            }
            if algorithm == Algorithm::Cart && branches.len() != 2 {
                return Err(Error::Model(
                    "binary trees allow exactly two branches".to_string(),
                ));
            }
            validate_outcomes(branches, &schema[*attr].kind)?;
            for b in branches {
                validate_node(&b.node, schema, class_index, algorithm)?;
            }
            Ok(())
        }
    }
}

fn validate_outcomes(branches: &[Branch], kind: &AttributeKind) -> Result<()> {
    match kind {
        AttributeKind::Nominal(values) => {
            let mut seen: BTreeSet<usize> = BTreeSet::new();
            let mut subsets = 0;
            for b in branches {
                match &b.outcome {
                    Outcome::Equals(v) => {
                        if *v >= values.len() || !seen.insert(*v) {
                            return Err(Error::Model(
                                "nominal outcomes must be distinct and in range".to_string(),
                            ));
                        }
                    }
                    Outcome::InSubset(s) => {
                        subsets += 1;
                        for v in s {
                            if *v >= values.len() || !seen.insert(*v) {
                                return Err(Error::Model(
                                    "subset outcomes must be disjoint and in range".to_string(),
                                ));
                            }
                        }
                    }
                    _ => {
                        return Err(Error::Model(
                            "threshold outcome on a nominal attribute".to_string(),
                        ))
                    }
                }
            }
            if subsets > 0 && (subsets != branches.len() || seen.len() != values.len()) {
                return Err(Error::Model(
                    "subset outcomes must cover the attribute's values".to_string(),
                ));
            }
            Ok(())
        }
        AttributeKind::Numeric => match branches {
            [a, b] => match (&a.outcome, &b.outcome) {
                (Outcome::Le(x), Outcome::Gt(y)) if x == y => Ok(()),
                _ => Err(Error::Model(
                    "numeric split needs matching <=/> thresholds".to_string(),
                )),
            },
            _ => Err(Error::Model(
                "numeric split needs exactly two branches".to_string(),
            )),
        },
    }
}
