//! Stratified k-fold cross-validation and the report surface:
//! accuracy triple, confusion matrix with an explicit unclassified
//! column, per-class TP/FP rates, and model build time.

use std::time::Instant;

use serde::Serialize;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::tree::Prediction;
use crate::Inducer;

/// Fold assignment of every instance of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    /// Fold index per instance, parallel to the dataset.
    pub assignment: Vec<usize>,
    pub seed: u64,
}

fn check_fold_count(d: &Dataset, k: usize) -> Result<()> {
    if k < 2 || k > d.len() {
        return Err(Error::InvalidArgument(format!(
            "fold count {k} outside 2..={}",
            d.len()
        )));
    }
    Ok(())
}

/// Seeded shuffle within each class, then round-robin dealing with a
/// counter running across classes: fold sizes and per-class counts
/// both stay within one of each other.
pub fn stratified_folds(d: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    check_fold_count(d, k)?;
    let mut rng = SplitMix64::new(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); d.n_classes()];
    for (i, inst) in d.instances().iter().enumerate() {
        by_class[d.class_of(inst)].push(i);
    }
    let mut assignment = vec![0usize; d.len()];
    let mut counter = 0usize;
    for group in &mut by_class {
        rng.shuffle(group);
        for idx in group.iter() {
            assignment[*idx] = counter % k;
            counter += 1;
        }
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}

/// Unstratified folding: one seeded shuffle, round-robin dealing.
pub fn plain_folds(d: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    check_fold_count(d, k)?;
    let mut rng = SplitMix64::new(seed);
    let mut order: Vec<usize> = (0..d.len()).collect();
    rng.shuffle(&mut order);
    let mut assignment = vec![0usize; d.len()];
    for (pos, idx) in order.into_iter().enumerate() {
        assignment[idx] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignment,
        seed,
    })
}

/// Class-by-class weight matrix. Rows are actual classes; columns are
/// predicted classes plus a trailing unclassified column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        ConfusionMatrix {
            labels,
            rows: vec![vec![0.0; n + 1]; n],
        }
    }

    pub fn record(&mut self, actual: usize, predicted: Prediction, weight: f64) {
        let col = match predicted {
            Prediction::Class(c) => c,
            Prediction::Unclassified => self.labels.len(),
        };
        self.rows[actual][col] += weight;
    }

    pub fn total_weight(&self) -> f64 {
        self.rows.iter().flatten().sum()
    }

    pub fn correct_weight(&self) -> f64 {
        (0..self.labels.len()).map(|c| self.rows[c][c]).sum()
    }

    pub fn unclassified_weight(&self) -> f64 {
        self.rows.iter().map(|r| r[self.labels.len()]).sum()
    }
}

/// Per-class sensitivity and false-alarm rate; `None` marks an
/// undefined (zero-denominator) rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassRates {
    pub label: String,
    pub tp_rate: Option<f64>,
    pub fp_rate: Option<f64>,
}

/// TP rate = TP/(TP+FN), FP rate = FP/(FP+TN). Unclassified outcomes
/// count as false negatives of the actual class and are never false
/// positives of any class.
pub fn class_rates(m: &ConfusionMatrix) -> Vec<ClassRates> {
    let n = m.labels.len();
    let total = m.total_weight();
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        let tp = m.rows[c][c];
        let actual_c: f64 = m.rows[c].iter().sum();
        let fn_w = actual_c - tp;
        let predicted_c: f64 = (0..n).map(|r| m.rows[r][c]).sum();
        let fp = predicted_c - tp;
        let tn = total - tp - fn_w - fp;
        let rate = |num: f64, den: f64| if den > 0.0 { Some(num / den) } else { None };
        out.push(ClassRates {
            label: m.labels[c].clone(),
            tp_rate: rate(tp, tp + fn_w),
            fp_rate: rate(fp, fp + tn),
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub algorithm: String,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
    pub correct_pct: f64,
    pub incorrect_pct: f64,
    pub unclassified_pct: f64,
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassRates>,
    /// Total wall time of the k training calls, in seconds.
    pub build_time_secs: f64,
}

/// Trains on k−1 folds, scores the held-out fold, and aggregates all
/// held-out predictions into one report.
pub fn cross_validate(
    inducer: &Inducer,
    d: &Dataset,
    k: usize,
    seed: u64,
    stratify: bool,
) -> Result<EvaluationReport> {
    let plan = if stratify {
        stratified_folds(d, k, seed)?
    } else {
        plain_folds(d, k, seed)?
    };
    let mut matrix = ConfusionMatrix::new(d.class_labels().to_vec());
    let mut build_time = 0.0;
    for fold in 0..k {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (inst, assigned) in d.instances().iter().zip(&plan.assignment) {
            if *assigned == fold {
                test.push(inst.clone());
            } else {
                train.push(inst.clone());
            }
        }
        let train = d.with_instances(train)?;
        let started = Instant::now();
        let tree = inducer.induce(&train)?;
        build_time += started.elapsed().as_secs_f64();
        for inst in &test {
            let predicted = tree.predict(inst)?;
            matrix.record(d.class_of(inst), predicted, inst.weight);
        }
    }

    let total = matrix.total_weight();
    let correct = matrix.correct_weight();
    let unclassified = matrix.unclassified_weight();
    let per_class = class_rates(&matrix);
    Ok(EvaluationReport {
        algorithm: inducer.algorithm().name().to_string(),
        k,
        seed,
        stratified: stratify,
        correct_pct: 100.0 * correct / total,
        incorrect_pct: 100.0 * (total - correct - unclassified) / total,
        unclassified_pct: 100.0 * unclassified / total,
        confusion: matrix,
        per_class,
        build_time_secs: build_time,
    })
}

/// Fixed-width text report: percentages to four decimals, build time
/// to two, rates to three. Undefined rates print as "—".
pub fn render_report(r: &EvaluationReport) -> String {
    let mut out = String::new();
    let strat = if r.stratified {
        "stratified"
    } else {
        "unstratified"
    };
    out.push_str(&format!(
        "=== {} evaluation: {}-fold cross-validation (seed {}, {strat}) ===\n\n",
        r.algorithm, r.k, r.seed
    ));
    out.push_str(&format!(
        "{:<36}{:>9.4}%\n",
        "Correctly Classified Instances", r.correct_pct
    ));
    out.push_str(&format!(
        "{:<36}{:>9.4}%\n",
        "Incorrectly Classified Instances", r.incorrect_pct
    ));
    out.push_str(&format!(
        "{:<36}{:>9.4}%\n",
        "Unclassified Instances", r.unclassified_pct
    ));
    out.push_str(&format!(
        "\nTime taken to build model: {:.2} sec\n\n",
        r.build_time_secs
    ));

    // Confusion matrix with a trailing unclassified column.
    let m = &r.confusion;
    let mut headers: Vec<&str> = m.labels.iter().map(String::as_str).collect();
    headers.push("Unclassified");
    let label_width = m.labels.iter().map(String::len).max().unwrap_or(0).max(6) + 2;
    let cells: Vec<Vec<String>> = m
        .rows
        .iter()
        .map(|row| row.iter().map(|w| format!("{w:.1}")).collect())
        .collect();
    let col_widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(j, h)| {
            cells
                .iter()
                .map(|row| row[j].len())
                .max()
                .unwrap_or(0)
                .max(h.len())
                + 2
        })
        .collect();
    out.push_str("Confusion Matrix (rows: actual, columns: predicted)\n");
    out.push_str(&" ".repeat(label_width));
    for (h, w) in headers.iter().zip(&col_widths) {
        out.push_str(&format!("{h:>w$}"));
    }
    out.push('\n');
    for (label, row) in m.labels.iter().zip(&cells) {
        out.push_str(&format!("{label:<label_width$}"));
        for (cell, w) in row.iter().zip(&col_widths) {
            out.push_str(&format!("{cell:>w$}"));
        }
        out.push('\n');
    }

    out.push('\n');
    let class_width = label_width.max("Class".len() + 2);
    out.push_str(&format!(
        "{:<class_width$}{:>9}{:>9}\n",
        "Class", "TP Rate", "FP Rate"
    ));
    for rates in &r.per_class {
        let fmt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.3}"),
            None => "—".to_string(),
        };
        out.push_str(&format!(
            "{:<class_width$}{:>9}{:>9}\n",
            rates.label,
            fmt(rates.tp_rate),
            fmt(rates.fp_rate)
        ));
    }
    out
}
