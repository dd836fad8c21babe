//! ID3 induction: multiway nominal splits chosen by information gain,
//! no pruning, null leaves for empty partitions.

use crate::dataset::{Cell, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{info_gain, ClassDistribution};
use crate::tree::{Algorithm, Branch, DecisionTree, Node, Outcome};

/// Builds an unpruned multiway tree. Only nominal attributes and fully
/// present data are accepted; the CLI offers grade binning for numeric
/// mark columns instead of discretizing here.
pub fn build_id3(d: &Dataset) -> Result<DecisionTree> {
    if d.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for (i, attr) in d.schema().iter().enumerate() {
        if i != d.class_index() && !attr.is_nominal() {
            return Err(Error::NumericAttribute {
                attribute: attr.name.clone(),
            });
        }
    }
    if d.instances()
        .iter()
        .any(|inst| inst.cells.iter().any(Cell::is_missing))
    {
        return Err(Error::MissingValues);
    }
    let attrs: Vec<usize> = (0..d.schema().len())
        .filter(|i| *i != d.class_index())
        .collect();
    let root = induce(d, &attrs)?;
    DecisionTree::new(Algorithm::Id3, d.schema().to_vec(), d.class_index(), root)
}

fn induce(d: &Dataset, attrs: &[usize]) -> Result<Node> {
    let dist = ClassDistribution::of(d);
    if dist.is_pure() {
        return Ok(Node::leaf(dist.majority(), dist.weights().to_vec()));
    }
    // An attribute can separate this node only with two or more
    // distinct values present. Splitting proceeds even at zero gain so
    // consistent data is always fit exactly.
    let usable: Vec<usize> = attrs
        .iter()
        .copied()
        .filter(|a| distinct_values(d, *a) >= 2)
        .collect();
    if usable.is_empty() {
        return Ok(Node::leaf(dist.majority(), dist.weights().to_vec()));
    }
    let mut best = usable[0];
    let mut best_gain = info_gain(d, best)?;
    for attr in &usable[1..] {
        let g = info_gain(d, *attr)?;
        if g > best_gain {
            best_gain = g;
            best = *attr;
        }
    }
    let remaining: Vec<usize> = attrs.iter().copied().filter(|a| *a != best).collect();
    let mut branches = Vec::with_capacity(d.attribute(best).cardinality());
    for value in 0..d.attribute(best).cardinality() {
        let sub = d.partition(best, &Outcome::Equals(value))?;
        let node = if sub.is_empty() {
            Node::Null
        } else {
            induce(&sub, &remaining)?
        };
        branches.push(Branch {
            outcome: Outcome::Equals(value),
            node,
        });
    }
    Ok(Node::Internal {
        attr: best,
        branches,
    })
}

fn distinct_values(d: &Dataset, attr: usize) -> usize {
    let mut seen = vec![false; d.attribute(attr).cardinality()];
    let mut count = 0;
    for inst in d.instances() {
        if let Cell::Nominal(v) = inst.cells[attr] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
            }
        }
    }
    count
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dataset::parse_arff;
    use crate::tree::Prediction;

    /// Three nominal attributes with gains 0.2467 / 0.1518 / 0.0481 on
    /// a 14-instance two-class table.
    pub(crate) fn weatherlike() -> Dataset {
        let rows = [
            ("v0", "hi", "w0", "n"),
            ("v0", "hi", "w1", "n"),
            ("v1", "hi", "w0", "p"),
            ("v2", "hi", "w0", "p"),
            ("v2", "lo", "w0", "p"),
            ("v2", "lo", "w1", "n"),
            ("v1", "lo", "w1", "p"),
            ("v0", "hi", "w0", "n"),
            ("v0", "lo", "w0", "p"),
            ("v2", "lo", "w0", "p"),
            ("v0", "lo", "w1", "p"),
            ("v1", "hi", "w1", "p"),
            ("v1", "lo", "w0", "p"),
            ("v2", "hi", "w1", "n"),
        ];
        let mut text = String::from(
            "@relation toy\n@attribute a {v0,v1,v2}\n@attribute b {hi,lo}\n@attribute w {w0,w1}\n@attribute c {p,n}\n@data\n",
        );
        for (a, b, w, c) in rows {
            text.push_str(&format!("{a},{b},{w},{c}\n"));
        }
        parse_arff(&text).unwrap()
    }

    #[test]
    fn pure_dataset_becomes_single_leaf() {
        let d =
            parse_arff("@relation t\n@attribute a {x,y}\n@attribute c {p,f}\n@data\nx,p\ny,p\n")
                .unwrap();
        let t = build_id3(&d).unwrap();
        assert_eq!(t.node_count(), (0, 1));
        let p = t.predict(&d.instances()[0]).unwrap();
        assert_eq!(t.label_of(p), Some("p"));
    }

    #[test]
    fn root_is_the_max_gain_attribute() {
        let d = weatherlike();
        let t = build_id3(&d).unwrap();
        match t.root() {
            Node::Internal { attr, .. } => {
                assert_eq!(*attr, 0, "attribute 'a' carries gain 0.2467")
            }
            other => panic!("expected a split at the root, got {other:?}"),
        }
    }

    #[test]
    fn absent_value_becomes_null_branch() {
        // Value z is declared but never observed.
        let d = parse_arff(
            "@relation t\n@attribute a {x,y,z}\n@attribute c {p,f}\n@data\nx,p\nx,p\ny,f\ny,f\n",
        )
        .unwrap();
        let t = build_id3(&d).unwrap();
        match t.root() {
            Node::Internal { branches, .. } => assert_eq!(branches[2].node, Node::Null),
            other => panic!("expected a split, got {other:?}"),
        }
        let probe = crate::dataset::Instance::new(vec![Cell::Nominal(2), Cell::Missing]);
        assert_eq!(t.predict(&probe).unwrap(), Prediction::Unclassified);
    }

    #[test]
    fn training_accuracy_is_total_on_consistent_data() {
        let d = weatherlike();
        let t = build_id3(&d).unwrap();
        for inst in d.instances() {
            let p = t.predict(inst).unwrap();
            assert_eq!(p, Prediction::Class(d.class_of(inst)));
        }
    }

    #[test]
    fn exact_fit_holds_even_when_all_gains_are_zero() {
        // Parity-shaped data: each attribute alone carries zero gain,
        // yet the table is consistent and must be fit exactly.
        let d = parse_arff(
            "@relation xor\n@attribute a {x,y}\n@attribute b {u,v}\n@attribute c {p,n}\n@data\nx,u,p\nx,v,n\ny,u,n\ny,v,p\n",
        )
        .unwrap();
        let t = build_id3(&d).unwrap();
        for inst in d.instances() {
            assert_eq!(
                t.predict(inst).unwrap(),
                Prediction::Class(d.class_of(inst))
            );
        }
    }

    #[test]
    fn attribute_appears_once_per_path() {
        fn walk(node: &Node, seen: &mut Vec<usize>) {
            if let Node::Internal { attr, branches } = node {
                assert!(!seen.contains(attr), "attribute {attr} reused on a path");
                seen.push(*attr);
                for b in branches {
                    walk(&b.node, seen);
                }
                seen.pop();
            }
        }
        let t = build_id3(&weatherlike()).unwrap();
        walk(t.root(), &mut Vec::new());
    }

    #[test]
    fn rejects_numeric_attributes() {
        let d = parse_arff("@relation t\n@attribute a numeric\n@attribute c {p,f}\n@data\n1,p\n")
            .unwrap();
        assert!(matches!(build_id3(&d), Err(Error::NumericAttribute { .. })));
    }

    #[test]
    fn rejects_missing_cells() {
        let d = parse_arff("@relation t\n@attribute a {x,y}\n@attribute c {p,f}\n@data\n?,p\n")
            .unwrap();
        assert!(matches!(build_id3(&d), Err(Error::MissingValues)));
    }

    #[test]
    fn rejects_empty_dataset() {
        let d = parse_arff("@relation t\n@attribute a {x,y}\n@attribute c {p,f}\n@data\n").unwrap();
        assert!(matches!(build_id3(&d), Err(Error::EmptyDataset)));
    }
}
