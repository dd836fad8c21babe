//! Impurity and split-quality measures.
//!
//! All logarithms are base 2, so entropies are in bits. Instances with
//! a missing value on the tested attribute are excluded; the C4.5
//! present-fraction scaling happens at selection time, not here.

use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};

/// Per-class weight totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    weights: Vec<f64>,
    total: f64,
}

impl ClassDistribution {
    pub fn new(n_classes: usize) -> Self {
        ClassDistribution {
            weights: vec![0.0; n_classes],
            total: 0.0,
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Self {
        let total = weights.iter().sum();
        ClassDistribution { weights, total }
    }

    /// Distribution over all instances of `d`.
    pub fn of(d: &Dataset) -> Self {
        let mut dist = ClassDistribution::new(d.n_classes());
        for inst in d.instances() {
            dist.add(d.class_of(inst), inst.weight);
        }
        dist
    }

    pub fn add(&mut self, class: usize, weight: f64) {
        self.weights[class] += weight;
        self.total += weight;
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total <= 0.0
    }

    /// Class with the largest weight; ties go to the lowest index.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (i, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = i;
            }
        }
        best
    }

    /// True when at most one class carries weight.
    pub fn is_pure(&self) -> bool {
        self.weights.iter().filter(|w| **w > 0.0).count() <= 1
    }
}

/// Shannon entropy in bits, with 0·log 0 = 0.
pub fn entropy(dist: &ClassDistribution) -> Result<f64> {
    entropy_of_sizes(dist.weights())
}

fn entropy_of_sizes(sizes: &[f64]) -> Result<f64> {
    let total: f64 = sizes.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "empty class distribution".to_string(),
        ));
    }
    let mut h = 0.0;
    for w in sizes {
        if *w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// Parent entropy minus weighted child entropies over a nominal
/// attribute's values, computed on instances where the value is present.
pub fn info_gain(d: &Dataset, attr: usize) -> Result<f64> {
    let (parent, children) = nominal_partition_dists(d, attr)?;
    let present = parent.total();
    let mut weighted = 0.0;
    for child in &children {
        if child.total() > 0.0 {
            weighted += child.total() / present * entropy(child)?;
        }
    }
    Ok(entropy(&parent)? - weighted)
}

/// Entropy of the branch-size distribution over a nominal attribute's
/// values.
pub fn split_info(d: &Dataset, attr: usize) -> Result<f64> {
    let (_, children) = nominal_partition_dists(d, attr)?;
    let sizes: Vec<f64> = children.iter().map(|c| c.total()).collect();
    entropy_of_sizes(&sizes)
}

/// Information gain divided by split info; 0 when split info is 0.
pub fn gain_ratio(d: &Dataset, attr: usize) -> Result<f64> {
    let gain = info_gain(d, attr)?;
    let si = split_info(d, attr)?;
    if si <= 0.0 {
        Ok(0.0)
    } else {
        Ok(gain / si)
    }
}

/// Gini impurity: 1 − Σ pᵢ².
pub fn gini(dist: &ClassDistribution) -> Result<f64> {
    if dist.is_empty() {
        return Err(Error::InvalidArgument(
            "empty class distribution".to_string(),
        ));
    }
    let total = dist.total();
    let sum_sq: f64 = dist
        .weights()
        .iter()
        .map(|w| (w / total) * (w / total))
        .sum();
    Ok(1.0 - sum_sq)
}

/// Weighted Gini of a binary partition; the CART inducer minimizes this.
pub fn gini_of_split(left: &Dataset, right: &Dataset) -> Result<f64> {
    gini_of_split_dists(&ClassDistribution::of(left), &ClassDistribution::of(right))
}

pub fn gini_of_split_dists(left: &ClassDistribution, right: &ClassDistribution) -> Result<f64> {
    let total = left.total() + right.total();
    if total <= 0.0 {
        return Err(Error::InvalidArgument(
            "both sides of the split are empty".to_string(),
        ));
    }
    let mut g = 0.0;
    if !left.is_empty() {
        g += left.total() / total * gini(left)?;
    }
    if !right.is_empty() {
        g += right.total() / total * gini(right)?;
    }
    Ok(g)
}

/// Parent and per-value class distributions of a nominal attribute,
/// restricted to instances where the attribute is present.
fn nominal_partition_dists(
    d: &Dataset,
    attr: usize,
) -> Result<(ClassDistribution, Vec<ClassDistribution>)> {
    if attr == d.class_index() {
        return Err(Error::InvalidArgument(
            "cannot compute a split measure on the class attribute".to_string(),
        ));
    }
    let spec = d.attribute(attr);
    if !spec.is_nominal() {
        return Err(Error::InvalidArgument(format!(
            "attribute '{}' is numeric; use a threshold search instead",
            spec.name
        )));
    }
    let mut parent = ClassDistribution::new(d.n_classes());
    let mut children = vec![ClassDistribution::new(d.n_classes()); spec.cardinality()];
    for inst in d.instances() {
        if let Cell::Nominal(v) = inst.cells[attr] {
            let class = d.class_of(inst);
            parent.add(class, inst.weight);
            children[v].add(class, inst.weight);
        }
    }
    if parent.is_empty() {
        return Err(Error::NoPresentValues {
            attribute: spec.name.clone(),
        });
    }
    Ok((parent, children))
}
