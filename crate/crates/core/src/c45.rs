//! C4.5 induction: gain-ratio selection with a mean-gain eligibility
//! filter, binary threshold splits on numerics, fractional descent of
//! missing-valued instances, and pessimistic (confidence-bound)
//! post-pruning.

use std::collections::BTreeSet;

use crate::dataset::{Cell, Dataset, Instance};
use crate::error::{Error, Result};
use crate::metrics::{entropy, ClassDistribution};
use crate::stats::binomial_cdf;
use crate::tree::{Algorithm, Branch, DecisionTree, Leaf, Node, Outcome};

#[derive(Debug, Clone)]
pub struct C45Config {
    /// Pruning confidence factor, in (0, 0.5].
    pub confidence_factor: f64,
    /// Minimum leaf weight; a node lighter than twice this becomes a
    /// leaf without attempting a split.
    pub min_leaf_weight: f64,
}

impl Default for C45Config {
    fn default() -> Self {
        C45Config {
            confidence_factor: 0.25,
            min_leaf_weight: 2.0,
        }
    }
}

impl C45Config {
    fn validate(&self) -> Result<()> {
        if !(self.confidence_factor > 0.0 && self.confidence_factor <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "confidence factor {} outside (0, 0.5]",
                self.confidence_factor
            )));
        }
        if !(self.min_leaf_weight >= 0.0 && self.min_leaf_weight.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "minimum leaf weight {} must be non-negative",
                self.min_leaf_weight
            )));
        }
        Ok(())
    }
}

/// Grows and pessimistically prunes a tree.
pub fn build_c45(d: &Dataset, cfg: &C45Config) -> Result<DecisionTree> {
    Ok(prune_pessimistic(&grow_c45(d, cfg)?, cfg))
}

/// Grows the unpruned tree.
pub fn grow_c45(d: &Dataset, cfg: &C45Config) -> Result<DecisionTree> {
    Ok(grow_c45_traced(d, cfg)?.0)
}

/// Grows the unpruned tree and also reports, per training instance,
/// the total weight that reached the leaves: the fractional shares of
/// a missing-valued instance must sum back to its original weight.
pub fn grow_c45_traced(d: &Dataset, cfg: &C45Config) -> Result<(DecisionTree, Vec<f64>)> {
    cfg.validate()?;
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let items: Vec<Work> = d
        .instances()
        .iter()
        .enumerate()
        .map(|(i, inst)| Work {
            inst: inst.clone(),
            origin: i,
        })
        .collect();
    let nominals: BTreeSet<usize> = (0..d.schema().len())
        .filter(|i| *i != d.class_index() && d.attribute(*i).is_nominal())
        .collect();
    let mut trace = vec![0.0; d.len()];
    let root = grow(&items, &nominals, d, cfg, &mut trace);
    let tree = DecisionTree::new(Algorithm::C45, d.schema().to_vec(), d.class_index(), root)?;
    Ok((tree, trace))
}

/// One working row during growth: a (possibly fractional-weight) copy
/// of a training instance plus its original index.
#[derive(Clone)]
struct Work {
    inst: Instance,
    origin: usize,
}

struct Candidate {
    attr: usize,
    gain: f64,
    split_info: f64,
    threshold: Option<f64>,
}

impl Candidate {
    fn gain_ratio(&self) -> f64 {
        if self.split_info <= 0.0 {
            0.0
        } else {
            self.gain / self.split_info
        }
    }
}

fn grow(
    items: &[Work],
    nominals: &BTreeSet<usize>,
    d: &Dataset,
    cfg: &C45Config,
    trace: &mut [f64],
) -> Node {
    let dist = node_distribution(items, d);
    if dist.is_pure() || dist.total() < 2.0 * cfg.min_leaf_weight {
        return make_leaf(dist, items, trace);
    }

    let mut candidates = Vec::new();
    for attr in 0..d.schema().len() {
        if attr == d.class_index() {
            continue;
        }
        if d.attribute(attr).is_nominal() {
            if !nominals.contains(&attr) {
                continue;
            }
            if let Some(c) = nominal_candidate(items, attr, d, dist.total()) {
                candidates.push(c);
            }
        } else if let Some(c) = numeric_candidate(items, attr, d, dist.total()) {
            candidates.push(c);
        }
    }
    if candidates.is_empty() {
        return make_leaf(dist, items, trace);
    }

    let mean_gain: f64 = candidates.iter().map(|c| c.gain).sum::<f64>() / candidates.len() as f64;
    let mut best: Option<&Candidate> = None;
    for c in &candidates {
        if c.gain + 1e-12 < mean_gain {
            continue;
        }
        match best {
            Some(b) if c.gain_ratio() <= b.gain_ratio() => {}
            _ => best = Some(c),
        }
    }
    let best = best.expect("at least one candidate reaches the mean gain");
    if best.gain <= 1e-12 {
        return make_leaf(dist, items, trace);
    }

    match best.threshold {
        None => {
            let attr = best.attr;
            let k = d.attribute(attr).cardinality();
            let mut groups: Vec<Vec<Work>> = vec![Vec::new(); k];
            let mut missing: Vec<&Work> = Vec::new();
            for w in items {
                match w.inst.cells[attr] {
                    Cell::Nominal(v) => groups[v].push(w.clone()),
                    _ => missing.push(w),
                }
            }
            let branch_weight: Vec<f64> = groups
                .iter()
                .map(|g| g.iter().map(|w| w.inst.weight).sum())
                .collect();
            let present: f64 = branch_weight.iter().sum();
            for w in missing {
                for (v, g) in groups.iter_mut().enumerate() {
                    let share = branch_weight[v] / present;
                    if share > 0.0 {
                        g.push(scaled(w, share));
                    }
                }
            }
            let mut remaining = nominals.clone();
            remaining.remove(&attr);
            let branches = groups
                .into_iter()
                .enumerate()
                .map(|(v, g)| Branch {
                    outcome: Outcome::Equals(v),
                    node: if g.is_empty() {
                        // No training evidence for this value: predict
                        // the node majority with zero recorded weight.
                        Node::leaf(dist.majority(), vec![0.0; d.n_classes()])
                    } else {
                        grow(&g, &remaining, d, cfg, trace)
                    },
                })
                .collect();
            Node::Internal { attr, branches }
        }
        Some(threshold) => {
            let attr = best.attr;
            let mut left: Vec<Work> = Vec::new();
            let mut right: Vec<Work> = Vec::new();
            let mut missing: Vec<&Work> = Vec::new();
            for w in items {
                match w.inst.cells[attr] {
                    Cell::Number(x) if x <= threshold => left.push(w.clone()),
                    Cell::Number(_) => right.push(w.clone()),
                    _ => missing.push(w),
                }
            }
            let lw: f64 = left.iter().map(|w| w.inst.weight).sum();
            let rw: f64 = right.iter().map(|w| w.inst.weight).sum();
            let present = lw + rw;
            for w in missing {
                if lw > 0.0 {
                    left.push(scaled(w, lw / present));
                }
                if rw > 0.0 {
                    right.push(scaled(w, rw / present));
                }
            }
            let branches = vec![
                Branch {
                    outcome: Outcome::Le(threshold),
                    node: grow(&left, nominals, d, cfg, trace),
                },
                Branch {
                    outcome: Outcome::Gt(threshold),
                    node: grow(&right, nominals, d, cfg, trace),
                },
            ];
            Node::Internal { attr, branches }
        }
    }
}

fn scaled(w: &Work, share: f64) -> Work {
    Work {
        inst: Instance::weighted(w.inst.cells.clone(), w.inst.weight * share),
        origin: w.origin,
    }
}

fn make_leaf(dist: ClassDistribution, items: &[Work], trace: &mut [f64]) -> Node {
    for w in items {
        trace[w.origin] += w.inst.weight;
    }
    Node::leaf(dist.majority(), dist.weights().to_vec())
}

fn node_distribution(items: &[Work], d: &Dataset) -> ClassDistribution {
    let mut dist = ClassDistribution::new(d.n_classes());
    for w in items {
        dist.add(d.class_of(&w.inst), w.inst.weight);
    }
    dist
}

/// Gain (scaled by the present fraction) and split info of a multiway
/// nominal split; `None` when fewer than two values are present.
fn nominal_candidate(items: &[Work], attr: usize, d: &Dataset, total: f64) -> Option<Candidate> {
    let k = d.attribute(attr).cardinality();
    let mut children = vec![ClassDistribution::new(d.n_classes()); k];
    let mut parent = ClassDistribution::new(d.n_classes());
    for w in items {
        if let Cell::Nominal(v) = w.inst.cells[attr] {
            let class = d.class_of(&w.inst);
            children[v].add(class, w.inst.weight);
            parent.add(class, w.inst.weight);
        }
    }
    let present = parent.total();
    if present <= 0.0 || children.iter().filter(|c| c.total() > 0.0).count() < 2 {
        return None;
    }
    let mut weighted = 0.0;
    for child in &children {
        if child.total() > 0.0 {
            weighted += child.total() / present * entropy(child).expect("non-empty child");
        }
    }
    let raw_gain = entropy(&parent).expect("non-empty parent") - weighted;
    let sizes: Vec<f64> = children.iter().map(|c| c.total()).collect();
    Some(Candidate {
        attr,
        gain: raw_gain * present / total,
        split_info: entropy_of_sizes(&sizes),
        threshold: None,
    })
}

/// Best threshold split of a numeric attribute; `None` when fewer than
/// two distinct values are present.
fn numeric_candidate(items: &[Work], attr: usize, d: &Dataset, total: f64) -> Option<Candidate> {
    let mut rows: Vec<(f64, usize, f64)> = items
        .iter()
        .filter_map(|w| match w.inst.cells[attr] {
            Cell::Number(x) => Some((x, d.class_of(&w.inst), w.inst.weight)),
            _ => None,
        })
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    let (threshold, raw_gain, lw, rw) = threshold_search(&rows, d.n_classes())?;
    let present = lw + rw;
    Some(Candidate {
        attr,
        gain: raw_gain * present / total,
        split_info: entropy_of_sizes(&[lw, rw]),
        threshold: Some(threshold),
    })
}

/// Scans midpoints between adjacent distinct values of pre-sorted
/// (value, class, weight) rows, maximizing binary information gain.
/// Ties keep the smaller threshold. Returns the threshold, its gain,
/// and the two side weights.
fn threshold_search(rows: &[(f64, usize, f64)], n_classes: usize) -> Option<(f64, f64, f64, f64)> {
    if rows.is_empty() {
        return None;
    }
    let mut parent = ClassDistribution::new(n_classes);
    for (_, class, weight) in rows {
        parent.add(*class, *weight);
    }
    let parent_entropy = entropy(&parent).expect("non-empty rows");
    let total = parent.total();

    let mut best: Option<(f64, f64, f64, f64)> = None;
    let mut left = ClassDistribution::new(n_classes);
    for i in 0..rows.len() - 1 {
        left.add(rows[i].1, rows[i].2);
        if rows[i].0 == rows[i + 1].0 {
            continue;
        }
        let threshold = (rows[i].0 + rows[i + 1].0) / 2.0;
        let right_weights: Vec<f64> = parent
            .weights()
            .iter()
            .zip(left.weights())
            .map(|(p, l)| p - l)
            .collect();
        let right = ClassDistribution::from_weights(right_weights);
        let gain = parent_entropy
            - left.total() / total * entropy(&left).expect("non-empty left")
            - right.total() / total * entropy(&right).expect("non-empty right");
        if best.is_none_or(|(_, g, _, _)| gain > g + 1e-12) {
            best = Some((threshold, gain, left.total(), right.total()));
        }
    }
    best
}

fn entropy_of_sizes(sizes: &[f64]) -> f64 {
    let total: f64 = sizes.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for s in sizes {
        if *s > 0.0 {
            let p = s / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Midpoint threshold with maximal information gain for a numeric
/// attribute of a dataset. Needs at least two distinct present values.
pub fn best_threshold(d: &Dataset, attr: usize) -> Result<(f64, f64)> {
    if attr == d.class_index() {
        return Err(Error::InvalidArgument(
            "cannot split on the class attribute".to_string(),
        ));
    }
    if d.attribute(attr).is_nominal() {
        return Err(Error::InvalidArgument(format!(
            "attribute '{}' is nominal; threshold search needs a numeric attribute",
            d.attribute(attr).name
        )));
    }
    let mut rows: Vec<(f64, usize, f64)> = d
        .instances()
        .iter()
        .filter_map(|inst| match inst.cells[attr] {
            Cell::Number(x) => Some((x, d.class_of(inst), inst.weight)),
            _ => None,
        })
        .collect();
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
    match threshold_search(&rows, d.n_classes()) {
        Some((threshold, gain, _, _)) => Ok((threshold, gain)),
        None => Err(Error::InvalidArgument(format!(
            "attribute '{}' has fewer than two distinct present values",
            d.attribute(attr).name
        ))),
    }
}

/// Weighted upper confidence limit of a leaf's error count: the error
/// rate p solving P[X ≤ e | Binomial(n, p)] = CF, times n. Exact
/// binomial inversion, continuous in e and n.
pub fn pessimistic_upper_error(e: f64, n: f64, cf: f64) -> Result<f64> {
    if !n.is_finite() || !e.is_finite() || n <= 0.0 || e < 0.0 || e > n + 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "error bound needs 0 <= e <= n and n > 0, got e={e}, n={n}"
        )));
    }
    if !(cf > 0.0 && cf <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "confidence factor {cf} outside (0, 0.5]"
        )));
    }
    if e >= n {
        return Ok(n);
    }
    // binomial_cdf is decreasing in p: bisect to the level-CF root.
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if binomial_cdf(e, n, mid) > cf {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi) * n)
}

/// Bottom-up pessimistic pruning: a subtree collapses to its majority
/// leaf whenever that leaf's error bound does not exceed the summed
/// bounds of the subtree's leaves.
pub fn prune_pessimistic(t: &DecisionTree, cfg: &C45Config) -> DecisionTree {
    let n_classes = t.class_labels().len();
    let root = prune_node(t.root().clone(), n_classes, cfg.confidence_factor);
    DecisionTree::new(t.algorithm(), t.schema().to_vec(), t.class_index(), root)
        .expect("pruning preserves tree validity")
}

fn prune_node(node: Node, n_classes: usize, cf: f64) -> Node {
    match node {
        Node::Internal { attr, branches } => {
            let branches: Vec<Branch> = branches
                .into_iter()
                .map(|b| Branch {
                    outcome: b.outcome,
                    node: prune_node(b.node, n_classes, cf),
                })
                .collect();
            let node = Node::Internal { attr, branches };
            let mut dist = vec![0.0; n_classes];
            node.class_mass_into(&mut dist);
            let candidate = Leaf::majority(dist);
            let n = candidate.n();
            if n <= 0.0 {
                return node;
            }
            let leaf_bound =
                pessimistic_upper_error(candidate.e(), n, cf).expect("valid bound inputs");
            if leaf_bound <= subtree_bound(&node, cf) + 1e-12 {
                Node::Leaf(candidate)
            } else {
                node
            }
        }
        other => other,
    }
}

fn subtree_bound(node: &Node, cf: f64) -> f64 {
    match node {
        Node::Internal { branches, .. } => {
            branches.iter().map(|b| subtree_bound(&b.node, cf)).sum()
        }
        Node::Leaf(leaf) => {
            if leaf.n() > 0.0 {
                pessimistic_upper_error(leaf.e(), leaf.n(), cf).expect("valid bound inputs")
            } else {
                0.0
            }
        }
        Node::Null => 0.0,
    }
}
