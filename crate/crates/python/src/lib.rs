//! Python bindings: kernels, model loading and classification, training from
//! files and the packaged Gaussian experiment.

use std::path::PathBuf;

use hetocc_core::classifier::persist::model_to_json;
use hetocc_core::classifier::{self, load_model, Ensemble, Provenance};
use hetocc_core::clustering::ExtentStrategy;
use hetocc_core::evaluation::{self, run_gaussian_experiment};
use hetocc_core::feature_space;
use hetocc_core::optimizer::{train_occ, GaConfig, Problem};
use hetocc_core::preprocessing::io::decode_pattern;
use hetocc_core::preprocessing::{read_records, read_schema, read_stats, NormalizationStats, Record, SyntheticSpec};
use pyo3::exceptions::{PyIOError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyInt, PyList, PyString, PyTuple};
use serde_json::Value;

fn to_py(e: hetocc_core::Error) -> PyErr {
    if e.is_io() {
        PyIOError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Python value to the JSON form used by dataset files; `None` is "not applicable".
fn to_json(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if obj.is_none() {
        Ok(Value::String("NA".into()))
    } else if obj.is_instance_of::<PyString>() {
        Ok(Value::String(obj.extract()?))
    } else if obj.is_instance_of::<pyo3::types::PyBool>() {
        Err(PyTypeError::new_err("booleans are not feature values"))
    } else if obj.is_instance_of::<PyInt>() {
        Ok(Value::from(obj.extract::<i64>()?))
    } else if obj.is_instance_of::<PyFloat>() {
        Ok(Value::from(obj.extract::<f64>()?))
    } else if obj.is_instance_of::<PyList>() || obj.is_instance_of::<PyTuple>() {
        obj.try_iter()?.map(|x| to_json(&x?)).collect::<PyResult<Vec<_>>>().map(Value::Array)
    } else {
        Err(PyTypeError::new_err(format!("unsupported feature value {obj}")))
    }
}

#[pyfunction]
fn dtw(x: Vec<f64>, y: Vec<f64>) -> f64 {
    feature_space::dtw(&x, &y)
}

#[pyfunction]
fn fuzzy_entropy(memberships: Vec<f64>) -> PyResult<f64> {
    classifier::fuzzy_entropy(&memberships).map_err(to_py)
}

#[pyfunction]
fn sigmoid_membership(d: f64, a: f64, b: f64) -> f64 {
    classifier::sigmoid_membership(d, a, b)
}

/// Area under the ROC curve; higher scores mean "more target".
#[pyfunction]
fn roc_auc(scores: Vec<f64>, labels: Vec<bool>) -> PyResult<f64> {
    if scores.len() != labels.len() {
        return Err(PyValueError::new_err("scores and labels differ in length"));
    }
    let pairs: Vec<(f64, bool)> = scores.into_iter().zip(labels).collect();
    evaluation::roc_auc(&pairs).map(|c| c.auc).map_err(to_py)
}

/// Trained replicate ensemble.
#[pyclass(module = "hetocc")]
struct Model {
    ensemble: Ensemble,
    provenance: Provenance,
}

#[pymethods]
impl Model {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let (ensemble, provenance) = load_model(&path).map_err(to_py)?;
        Ok(Model { ensemble, provenance })
    }

    #[getter]
    fn k(&self) -> usize {
        self.ensemble.k()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.ensemble.selected_model().weights.as_slice().to_vec()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        let schema = &self.ensemble.selected_model().schema;
        schema.features().iter().map(|f| f.name.clone()).collect()
    }

    /// Classifies one raw pattern given as a list in schema order. Returns
    /// `(target, membership, cluster, dissimilarity)`.
    fn classify(&self, values: &Bound<'_, PyAny>) -> PyResult<(bool, f64, usize, f64)> {
        let m = self.ensemble.selected_model();
        let raw = decode_pattern(&to_json(values)?, &m.schema).map_err(PyValueError::new_err)?;
        let pattern = m.stats.apply(&raw).map_err(to_py)?;
        let d = self.ensemble.classify(&pattern).map_err(to_py)?;
        Ok((d.target, d.membership, d.cluster, d.dissimilarity))
    }

    fn to_json(&self) -> String {
        model_to_json(&self.ensemble, &self.provenance)
    }

    fn __repr__(&self) -> String {
        format!("Model(k={}, features={})", self.k(), self.ensemble.selected_model().schema.len())
    }
}

/// Trains on the given files (targets only in `train`, labeled
/// `validation`) and returns the model with a per-`k` validation summary.
/// Normalization is read from `stats` when given, fitted on `train` otherwise.
#[pyfunction]
#[pyo3(signature = (schema, train, validation, stats=None, k_min=1, k_max=5, seed=0, max_generations=250))]
#[allow(clippy::too_many_arguments)]
fn train(
    py: Python<'_>,
    schema: PathBuf,
    train: PathBuf,
    validation: PathBuf,
    stats: Option<PathBuf>,
    k_min: usize,
    k_max: usize,
    seed: u64,
    max_generations: usize,
) -> PyResult<(Model, Vec<Py<PyDict>>)> {
    let config = GaConfig {
        k_min,
        k_max,
        seed,
        max_generations,
        ..GaConfig::default()
    };
    config.validate().map_err(to_py)?;
    let outcome = py
        .detach(|| -> hetocc_core::Result<_> {
            let schema = read_schema(&schema)?;
            let raw: Vec<_> = read_records(&train, &schema)?.into_iter().map(|r| r.pattern).collect();
            let stats = match &stats {
                Some(p) => read_stats(p)?,
                None => NormalizationStats::fit(&schema, &raw)?,
            };
            let patterns = stats.apply_all(&raw)?;
            let validation = read_records(&validation, &schema)?
                .into_iter()
                .map(|r| {
                    Ok(Record {
                        pattern: stats.apply(&r.pattern)?,
                        target: r.target,
                    })
                })
                .collect::<hetocc_core::Result<Vec<_>>>()?;
            let problem = Problem::new(&schema, &stats, &patterns, &validation, ExtentStrategy::Mean)?;
            train_occ(&config, &problem)
        })
        .map_err(to_py)?;
    let mut rows = Vec::new();
    for (i, r) in outcome.reports.iter().enumerate() {
        let d = PyDict::new(py);
        d.set_item("k", r.k)?;
        d.set_item("selected", i == outcome.selected)?;
        d.set_item("best_fitness", r.best_fitness)?;
        d.set_item("validation_accuracy", r.validation_accuracy)?;
        d.set_item("validation_fuzzy_entropy", r.validation_fuzzy_entropy)?;
        d.set_item("generations", r.trace.generations())?;
        rows.push(d.unbind());
    }
    let model = Model {
        ensemble: outcome.into_ensemble(),
        provenance: Provenance::new("python", seed),
    };
    Ok((model, rows))
}

/// Three Gaussian clusters against uniform non-targets; returns the test
/// metrics of the selected model.
#[pyfunction]
#[pyo3(signature = (spread=0.035, ratio=0.1, k=3, seed=1))]
fn gaussian_experiment(py: Python<'_>, spread: f64, ratio: f64, k: usize, seed: u64) -> PyResult<Py<PyDict>> {
    if !(ratio > 0.0) {
        return Err(PyValueError::new_err("ratio must be positive"));
    }
    let mut spec = SyntheticSpec::three_gaussians(spread, seed);
    spec.test_nontargets = (spec.train_targets as f64 / ratio).round() as usize;
    let config = GaConfig {
        k_min: k,
        k_max: k,
        seed,
        ..GaConfig::default()
    };
    let run = py
        .detach(|| run_gaussian_experiment(&spec, &config, ExtentStrategy::Mean))
        .map_err(to_py)?;
    let row = run.selected_row();
    let m = &row.test.metrics;
    let d = PyDict::new(py);
    d.set_item("k", row.k)?;
    d.set_item("fpr", m.fpr)?;
    d.set_item("recall", m.recall)?;
    d.set_item("precision", m.precision)?;
    d.set_item("accuracy", m.accuracy)?;
    d.set_item("auc", row.test.auc)?;
    d.set_item("fuzzy_entropy", row.test.fuzzy_entropy)?;
    d.set_item("validation_fuzzy_entropy", row.validation_fuzzy_entropy)?;
    Ok(d.unbind())
}

#[pymodule]
fn hetocc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(dtw, m)?)?;
    m.add_function(wrap_pyfunction!(fuzzy_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(sigmoid_membership, m)?)?;
    m.add_function(wrap_pyfunction!(roc_auc, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_experiment, m)?)?;
    m.add_class::<Model>()?;
    Ok(())
}
