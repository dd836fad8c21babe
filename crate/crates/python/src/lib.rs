//! Python bindings: datasets, the three tree inducers, rule rendering,
//! model persistence and cross-validated evaluation.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use treelab::c45::C45Config;
use treelab::cart::CartConfig;
use treelab::evaluation;
use treelab::tree;
use treelab::{dataset, Inducer, Prediction};

fn to_py_err(e: treelab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_inducer(
    algo: &str,
    cf: f64,
    min_leaf: f64,
    folds_internal: usize,
    one_se: bool,
    seed: u64,
) -> PyResult<Inducer> {
    match algo.to_ascii_lowercase().as_str() {
        "id3" => Ok(Inducer::Id3),
        "c45" | "c4.5" => Ok(Inducer::C45(C45Config {
            confidence_factor: cf,
            min_leaf_weight: min_leaf,
        })),
        "cart" => Ok(Inducer::Cart(CartConfig {
            internal_folds: folds_internal,
            one_se_rule: one_se,
            min_leaf_weight: min_leaf,
            seed,
            ..CartConfig::default()
        })),
        other => Err(PyValueError::new_err(format!(
            "unknown algorithm '{other}' (expected id3, c45 or cart)"
        ))),
    }
}

/// An immutable ARFF-backed table of instances.
#[pyclass(frozen)]
struct Dataset {
    inner: dataset::Dataset,
}

#[pymethods]
impl Dataset {
    /// Parses ARFF text; the last attribute is the class.
    #[staticmethod]
    fn from_arff(text: &str) -> PyResult<Self> {
        Ok(Dataset {
            inner: dataset::parse_arff(text).map_err(to_py_err)?,
        })
    }

    /// Deterministic synthetic student enrolment data.
    #[staticmethod]
    #[pyo3(signature = (seed=1, n=90))]
    fn synthetic(seed: u64, n: usize) -> Self {
        Dataset {
            inner: dataset::generate_synthetic(seed, n),
        }
    }

    fn to_arff(&self) -> String {
        dataset::serialize_arff(&self.inner)
    }

    #[getter]
    fn relation(&self) -> String {
        self.inner.relation().to_string()
    }

    #[getter]
    fn attribute_names(&self) -> Vec<String> {
        self.inner.schema().iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn class_name(&self) -> String {
        self.inner.class_attribute().name.clone()
    }

    #[getter]
    fn class_labels(&self) -> Vec<String> {
        self.inner.class_labels().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(relation='{}', attributes={}, instances={})",
            self.inner.relation(),
            self.inner.schema().len(),
            self.inner.len()
        )
    }
}

/// A trained ID3, C4.5 or CART model.
#[pyclass(frozen, name = "DecisionTree")]
struct PyDecisionTree {
    inner: tree::DecisionTree,
}

#[pymethods]
impl PyDecisionTree {
    #[getter]
    fn algorithm(&self) -> &'static str {
        self.inner.algorithm().name()
    }

    /// Indented rule text, one arc per line.
    fn rules(&self) -> String {
        self.inner.render_rules()
    }

    /// (internal nodes, leaves); null leaves count as leaves.
    fn node_count(&self) -> (usize, usize) {
        self.inner.node_count()
    }

    /// Class label per instance; None when the tree cannot classify.
    fn predict(&self, data: &Dataset) -> PyResult<Vec<Option<String>>> {
        data.inner
            .instances()
            .iter()
            .map(|inst| {
                let p = self.inner.predict(inst).map_err(to_py_err)?;
                Ok(match p {
                    Prediction::Class(c) => Some(self.inner.class_labels()[c].clone()),
                    Prediction::Unclassified => None,
                })
            })
            .collect()
    }

    /// Versioned, schema-hashed JSON document.
    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyDecisionTree {
            inner: tree::DecisionTree::from_json(text).map_err(to_py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        let (internal, leaves) = self.inner.node_count();
        format!(
            "DecisionTree(algorithm='{}', internal={internal}, leaves={leaves})",
            self.inner.algorithm().name()
        )
    }
}

/// Cross-validation outcome: accuracy triple, confusion matrix,
/// per-class rates and build time.
#[pyclass(frozen, name = "EvaluationReport")]
struct PyEvaluationReport {
    inner: evaluation::EvaluationReport,
}

#[pymethods]
impl PyEvaluationReport {
    #[getter]
    fn algorithm(&self) -> String {
        self.inner.algorithm.clone()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn correct_pct(&self) -> f64 {
        self.inner.correct_pct
    }

    #[getter]
    fn incorrect_pct(&self) -> f64 {
        self.inner.incorrect_pct
    }

    #[getter]
    fn unclassified_pct(&self) -> f64 {
        self.inner.unclassified_pct
    }

    #[getter]
    fn build_time_secs(&self) -> f64 {
        self.inner.build_time_secs
    }

    /// Row labels of the confusion matrix.
    #[getter]
    fn class_labels(&self) -> Vec<String> {
        self.inner.confusion.labels.clone()
    }

    /// Weight matrix; one row per actual class, columns are predicted
    /// classes plus a trailing unclassified column.
    fn confusion(&self) -> Vec<Vec<f64>> {
        self.inner.confusion.rows.clone()
    }

    /// (label, tp_rate, fp_rate) per class; rates are None when
    /// undefined.
    fn per_class(&self) -> Vec<(String, Option<f64>, Option<f64>)> {
        self.inner
            .per_class
            .iter()
            .map(|r| (r.label.clone(), r.tp_rate, r.fp_rate))
            .collect()
    }

    /// The fixed-width text report.
    fn render(&self) -> String {
        evaluation::render_report(&self.inner)
    }

    /// The report as a JSON document.
    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "EvaluationReport(algorithm='{}', correct={:.4}%, incorrect={:.4}%, unclassified={:.4}%)",
            self.inner.algorithm,
            self.inner.correct_pct,
            self.inner.incorrect_pct,
            self.inner.unclassified_pct
        )
    }
}

/// Trains a decision tree, including the algorithm's pruning step.
#[pyfunction]
#[pyo3(signature = (data, algo, cf=0.25, min_leaf=2.0, folds_internal=5, one_se=true, seed=1))]
fn train(
    data: &Dataset,
    algo: &str,
    cf: f64,
    min_leaf: f64,
    folds_internal: usize,
    one_se: bool,
    seed: u64,
) -> PyResult<PyDecisionTree> {
    let inducer = parse_inducer(algo, cf, min_leaf, folds_internal, one_se, seed)?;
    Ok(PyDecisionTree {
        inner: inducer.induce(&data.inner).map_err(to_py_err)?,
    })
}

/// Stratified k-fold cross-validation of one algorithm.
#[pyfunction]
#[pyo3(signature = (data, algo, k=10, seed=1, stratify=true, cf=0.25, min_leaf=2.0, folds_internal=5, one_se=true))]
#[allow(clippy::too_many_arguments)]
fn evaluate(
    data: &Dataset,
    algo: &str,
    k: usize,
    seed: u64,
    stratify: bool,
    cf: f64,
    min_leaf: f64,
    folds_internal: usize,
    one_se: bool,
) -> PyResult<PyEvaluationReport> {
    let inducer = parse_inducer(algo, cf, min_leaf, folds_internal, one_se, seed)?;
    Ok(PyEvaluationReport {
        inner: evaluation::cross_validate(&inducer, &data.inner, k, seed, stratify)
            .map_err(to_py_err)?,
    })
}

/// Maps a mark percentage in [0, 100] to its grade band O..F.
#[pyfunction]
fn bin_grade(percentage: f64) -> PyResult<String> {
    Ok(dataset::bin_grade(percentage)
        .map_err(to_py_err)?
        .label()
        .to_string())
}

/// Pass/Promoted/Fail from failed theory and practical counts.
#[pyfunction]
fn derive_result(failed_theory: u32, failed_practical: u32) -> String {
    dataset::derive_result(failed_theory, failed_practical)
        .label()
        .to_string()
}

#[pymodule]
fn treelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<PyDecisionTree>()?;
    m.add_class::<PyEvaluationReport>()?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(bin_grade, m)?)?;
    m.add_function(wrap_pyfunction!(derive_result, m)?)?;
    Ok(())
}
