//! Python bindings. Reports come back as plain dicts (via their JSON form);
//! sets and models are wrapped.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use crset::hitting::{self, ExactHitting};
use crset::laws::{self, Classifier, FidiSpec};
use crset::models::{self, CrSetModel};
use crset::partition::{self, FinitePointSet};
use crset::setalg::{self, DiscreteSet, IntervalSet as CoreIntervalSet};
use crset::{cli, sigma};

fn err(e: crset::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Finite union of half-open intervals `[a, b)`.
#[pyclass(module = "crset_py", frozen, from_py_object)]
#[derive(Clone)]
struct IntervalSet(CoreIntervalSet);

#[pymethods]
impl IntervalSet {
    #[new]
    fn new(pairs: Vec<(f64, f64)>) -> PyResult<Self> {
        CoreIntervalSet::new(pairs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn empty() -> Self {
        Self(CoreIntervalSet::empty())
    }

    fn components(&self) -> Vec<(f64, f64)> {
        self.0.components().to_vec()
    }

    fn lebesgue(&self) -> f64 {
        self.0.lebesgue()
    }

    fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn __contains__(&self, x: f64) -> bool {
        self.0.contains(x)
    }

    fn union(&self, other: &IntervalSet) -> Self {
        Self(self.0.union(&other.0))
    }

    fn intersect(&self, other: &IntervalSet) -> Self {
        Self(self.0.intersect(&other.0))
    }

    fn difference(&self, other: &IntervalSet) -> Self {
        Self(self.0.difference(&other.0))
    }

    fn is_subset(&self, other: &IntervalSet) -> bool {
        self.0.is_subset(&other.0)
    }

    fn __eq__(&self, other: &IntervalSet) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("IntervalSet({})", self.0)
    }
}

/// A constructive countable random set model.
#[pyclass(module = "crset_py", frozen, from_py_object)]
#[derive(Clone)]
struct Model(CrSetModel);

#[pymethods]
impl Model {
    /// Built-in name, path to a JSON file, or inline JSON.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        cli::load_model(spec).map(Self).map_err(err)
    }

    #[staticmethod]
    fn poisson(support: &IntervalSet, rate: f64) -> PyResult<Self> {
        CrSetModel::poisson(support.0.clone(), rate)
            .map(Self)
            .map_err(err)
    }

    fn is_poisson(&self) -> bool {
        self.0.is_poisson()
    }

    /// `μ(A)`; infinite where the intensity diverges.
    fn intensity(&self, a: &IntervalSet) -> PyResult<f64> {
        self.0.intensity(&(&a.0).into()).map_err(err)
    }

    /// Closed-form `T(A)`.
    fn hitting(&self, a: &IntervalSet) -> f64 {
        models::analytic_hitting(&self.0, &a.0)
    }

    #[pyo3(signature = (depth, seed, replicate=0))]
    fn sample(&self, depth: u64, seed: u64, replicate: u64) -> Vec<f64> {
        models::sample_replicate(&self.0, depth, seed, replicate)
            .points()
            .to_vec()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Model({})", self.0.name.as_deref().unwrap_or("inline"))
    }
}

#[pyfunction]
fn builtin_models() -> Vec<(&'static str, &'static str)> {
    models::builtin_names()
}

#[pyfunction]
fn dyadic_ring_sets(count: usize) -> Vec<IntervalSet> {
    setalg::dyadic_ring_sets(count)
        .into_iter()
        .map(IntervalSet)
        .collect()
}

#[pyfunction]
fn grid(lo: f64, hi: f64, cells: usize) -> Vec<IntervalSet> {
    setalg::grid(lo, hi, cells)
        .into_iter()
        .map(IntervalSet)
        .collect()
}

fn unwrap_sets(sets: &[IntervalSet]) -> Vec<CoreIntervalSet> {
    sets.iter().map(|s| s.0.clone()).collect()
}

/// Canonical enumeration of a finite subset of `window` by the dyadic
/// family; the first `count` terms.
#[pyfunction]
#[pyo3(signature = (points, fallback, count, window=(0.0, 1.0)))]
fn enumerate_points(
    points: Vec<f64>,
    fallback: f64,
    count: usize,
    window: (f64, f64),
) -> PyResult<Vec<f64>> {
    let family = setalg::dyadic_family(CoreIntervalSet::interval(window.0, window.1).map_err(err)?)
        .map_err(err)?;
    let e = partition::enumerate_finite(&FinitePointSet::new(points), fallback, &family)
        .map_err(err)?;
    Ok(e.first(count))
}

/// Number of depth-`depth` dyadic cells of `a` holding a point.
#[pyfunction]
#[pyo3(signature = (points, a, depth, window=(0.0, 1.0)))]
fn leadbetter_count(
    points: Vec<f64>,
    a: &IntervalSet,
    depth: u32,
    window: (f64, f64),
) -> PyResult<usize> {
    let family = setalg::dyadic_family(CoreIntervalSet::interval(window.0, window.1).map_err(err)?)
        .map_err(err)?;
    Ok(partition::leadbetter_count(
        &FinitePointSet::new(points),
        &a.0,
        &family,
        depth,
    ))
}

#[pyfunction]
#[pyo3(signature = (m, trials, seed, exhaustive=false))]
fn sigma_check(
    py: Python<'_>,
    m: usize,
    trials: u64,
    seed: u64,
    exhaustive: bool,
) -> PyResult<Py<PyAny>> {
    let report = if exhaustive {
        sigma::exhaustive_checks(m)
    } else {
        sigma::randomized_checks(m, trials, seed)
    }
    .map_err(err)?;
    to_py(py, &report)
}

#[pyfunction]
#[pyo3(signature = (model, sets, n, seed, depth=64))]
fn estimate_hitting(
    py: Python<'_>,
    model: &Model,
    sets: Vec<IntervalSet>,
    n: u64,
    seed: u64,
    depth: u64,
) -> PyResult<Py<PyAny>> {
    let sets = unwrap_sets(&sets);
    let r = py
        .detach(|| hitting::estimate_hitting_all(&model.0, &sets, n, depth, seed))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (model, sets, n, seed, depth=64))]
fn renyi_verify(
    py: Python<'_>,
    model: &Model,
    sets: Vec<IntervalSet>,
    n: u64,
    seed: u64,
    depth: u64,
) -> PyResult<Py<PyAny>> {
    let sets = unwrap_sets(&sets);
    let r = py
        .detach(|| hitting::renyi_verify(&model.0, &sets, n, depth, seed))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (m1, m2, ring, fidi_sets, n, seed, cap=4, depth=64, alpha=0.01))]
#[allow(clippy::too_many_arguments)]
fn uniqueness_check(
    py: Python<'_>,
    m1: &Model,
    m2: &Model,
    ring: Vec<IntervalSet>,
    fidi_sets: Vec<IntervalSet>,
    n: u64,
    seed: u64,
    cap: u64,
    depth: u64,
    alpha: f64,
) -> PyResult<Py<PyAny>> {
    let ring = unwrap_sets(&ring);
    let fidi = FidiSpec::new(unwrap_sets(&fidi_sets), cap).map_err(err)?;
    let r = py
        .detach(|| laws::uniqueness_check(&m1.0, &m2.0, &ring, &fidi, n, depth, seed, alpha))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (model, sets, n, seed, depth=64, alpha=0.01))]
fn increments_check(
    py: Python<'_>,
    model: &Model,
    sets: Vec<IntervalSet>,
    n: u64,
    seed: u64,
    depth: u64,
    alpha: f64,
) -> PyResult<Py<PyAny>> {
    let sets = unwrap_sets(&sets);
    let r = py
        .detach(|| laws::increments_check(&model.0, &sets, n, depth, seed, alpha))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn recover_mass(t: f64) -> f64 {
    laws::recover_mass(t)
}

/// Splits the cells into null, sigma-finite and infinite-mass classes with
/// the closed-form classifier.
#[pyfunction]
fn decompose(py: Python<'_>, model: &Model, cells: Vec<IntervalSet>) -> PyResult<Py<PyAny>> {
    let r = laws::decompose(&model.0, &unwrap_sets(&cells), Classifier::Analytic).map_err(err)?;
    to_py(py, &r)
}

/// Inner/outer approximation check for an exact hitting function on
/// `{0..m-1}` given by independent inclusion probabilities.
#[pyfunction]
fn sandwich_independent(py: Python<'_>, probs: Vec<f64>) -> PyResult<Py<PyAny>> {
    let t = ExactHitting::independent(&probs).map_err(err)?;
    let family = hitting::interval_semiring(t.universe_size()).map_err(err)?;
    let r = hitting::inner_outer_sandwich(&t, &family).map_err(err)?;
    to_py(py, &r)
}

/// Exact `T(A)` for independent inclusion; `a` lists the points of `A`.
#[pyfunction]
fn exact_hitting_independent(probs: Vec<f64>, a: Vec<usize>) -> PyResult<f64> {
    let t = ExactHitting::independent(&probs).map_err(err)?;
    let set = DiscreteSet::from_points(probs.len(), a).map_err(err)?;
    Ok(t.evaluate(&set))
}

#[pymodule]
fn crset_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<IntervalSet>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(builtin_models, m)?)?;
    m.add_function(wrap_pyfunction!(dyadic_ring_sets, m)?)?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_points, m)?)?;
    m.add_function(wrap_pyfunction!(leadbetter_count, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_check, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_hitting, m)?)?;
    m.add_function(wrap_pyfunction!(renyi_verify, m)?)?;
    m.add_function(wrap_pyfunction!(uniqueness_check, m)?)?;
    m.add_function(wrap_pyfunction!(increments_check, m)?)?;
    m.add_function(wrap_pyfunction!(recover_mass, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(sandwich_independent, m)?)?;
    m.add_function(wrap_pyfunction!(exact_hitting_independent, m)?)?;
    Ok(())
}
