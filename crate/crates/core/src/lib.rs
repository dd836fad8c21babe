//! Decision-tree induction workbench.
//!
//! Implements the three classic classification-tree learners over a
//! small ARFF-subset data layer: ID3 (multiway nominal splits by
//! information gain), C4.5 (gain ratio, numeric thresholds, fractional
//! missing-value handling, pessimistic pruning) and CART (binary Gini
//! splits, cost-complexity pruning). Stratified k-fold cross-validation
//! produces text and JSON evaluation reports.

pub mod c45;
pub mod cart;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod id3;
pub mod metrics;
pub mod rng;
pub mod stats;
pub mod tree;

pub use dataset::{AttributeKind, AttributeSpec, Cell, Dataset, Grade, Instance, ResultLabel};
pub use error::{Error, Result};
pub use tree::{Algorithm, DecisionTree, Node, Outcome, Prediction};

use c45::C45Config;
use cart::CartConfig;

/// An induction algorithm plus its configuration, ready to train.
#[derive(Debug, Clone)]
pub enum Inducer {
    Id3,
    C45(C45Config),
    Cart(CartConfig),
}

impl Inducer {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            Inducer::Id3 => Algorithm::Id3,
            Inducer::C45(_) => Algorithm::C45,
            Inducer::Cart(_) => Algorithm::Cart,
        }
    }

    /// Trains a tree on `data`, including the algorithm's post-pruning.
    pub fn induce(&self, data: &Dataset) -> Result<DecisionTree> {
        match self {
            Inducer::Id3 => id3::build_id3(data),
            Inducer::C45(cfg) => c45::build_c45(data, cfg),
            Inducer::Cart(cfg) => cart::build_cart(data, cfg),
        }
    }
}
