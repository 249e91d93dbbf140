//! Python bindings. Models, statistics and experiment configs cross the
//! boundary as JSON strings in the same schema the CLI reads.

use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use netweight::bounds::{self, BoundInputs, CoveringModel};
use netweight::hypergraph::{self as hg, families, ExactCaps, KPartiteHypergraph};
use netweight::learner::{self, FitOptions, FitPath, Solver};
use netweight::simulator::{
    self, ConcavityOutcome, ConcentrationConfig, ErmConfig, GenerativeModel, Statistic,
};
use netweight::weighting::{self, Weighting};
use netweight::{DependencyGraph, Error, Example};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InstanceTooLarge { .. } => PyOverflowError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("bad {what} JSON: {e}")))
}

/// A k-partite hypergraph; each hyperedge is one example.
#[pyclass(name = "Hypergraph", module = "netweight", frozen)]
struct PyHypergraph {
    inner: KPartiteHypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(partition_sizes: Vec<usize>, edges: Vec<Vec<usize>>) -> PyResult<Self> {
        KPartiteHypergraph::new(partition_sizes, edges)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    /// Parse the text file format (or its JSON equivalent).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        hg::parse_hypergraph(text)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (m, k=2))]
    fn disjoint(m: usize, k: usize) -> PyResult<Self> {
        families::disjoint(m, k)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (m, k=2))]
    fn star(m: usize, k: usize) -> PyResult<Self> {
        families::star(m, k)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (m, k=3))]
    fn cycle(m: usize, k: usize) -> PyResult<Self> {
        families::cycle(m, k)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    #[pyo3(signature = (m, partition_sizes, seed=0))]
    fn random(m: usize, partition_sizes: Vec<usize>, seed: u64) -> PyResult<Self> {
        families::random(partition_sizes.len(), m, &partition_sizes, seed)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn partition_sizes(&self) -> Vec<usize> {
        self.inner.partition_sizes().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<Vec<usize>> {
        self.inner.edges().map(<[usize]>::to_vec).collect()
    }

    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    /// Index pairs of overlapping edges (the dependency graph).
    fn dependency_edges(&self) -> Vec<(usize, usize)> {
        let gamma = DependencyGraph::build(&self.inner);
        (0..gamma.m())
            .flat_map(|a| {
                gamma
                    .neighbors(a)
                    .iter()
                    .filter(move |&&b| b > a)
                    .map(move |&b| (a, b))
            })
            .collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __len__(&self) -> usize {
        self.inner.m()
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(k={}, m={}, partition_sizes={:?})",
            self.inner.k(),
            self.inner.m(),
            self.inner.partition_sizes()
        )
    }
}

/// Per-edge weights with their method tag and normaliser.
#[pyclass(name = "Weighting", module = "netweight", frozen, get_all)]
struct PyWeighting {
    method: String,
    weights: Vec<f64>,
    normalizer: f64,
}

impl From<Weighting> for PyWeighting {
    fn from(w: Weighting) -> Self {
        Self {
            method: w.method.to_string(),
            weights: w.weights,
            normalizer: w.normalizer,
        }
    }
}

#[pymethods]
impl PyWeighting {
    fn __repr__(&self) -> String {
        format!(
            "Weighting(method={:?}, normalizer={}, m={})",
            self.method,
            self.normalizer,
            self.weights.len()
        )
    }
}

#[pyfunction]
fn independence_number(g: &PyHypergraph) -> PyResult<usize> {
    let caps = ExactCaps::from_env().map_err(py_err)?;
    hg::independence_number_with_cap(&DependencyGraph::build(&g.inner), caps.alpha).map_err(py_err)
}

#[pyfunction]
fn fractional_chromatic_number(g: &PyHypergraph) -> PyResult<f64> {
    let caps = ExactCaps::from_env().map_err(py_err)?;
    hg::fractional_chromatic_number_with_cap(&DependencyGraph::build(&g.inner), caps.chi)
        .map(|c| c.value)
        .map_err(py_err)
}

#[pyfunction]
fn eqw_weights(g: &PyHypergraph) -> PyResult<PyWeighting> {
    weighting::eqw_weights(&g.inner)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (g, order=None))]
fn greedy_matching_weights(g: &PyHypergraph, order: Option<Vec<usize>>) -> PyResult<PyWeighting> {
    weighting::greedy_matching_weights(&g.inner, order.as_deref())
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
fn exact_matching_weights(g: &PyHypergraph) -> PyResult<PyWeighting> {
    let caps = ExactCaps::from_env().map_err(py_err)?;
    weighting::exact_matching_weights(&g.inner, caps.alpha)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
fn optimal_weighting(g: &PyHypergraph) -> PyResult<PyWeighting> {
    weighting::optimal_weighting(&g.inner)
        .map(Into::into)
        .map_err(py_err)
}

/// `(weights, s, vertex_cover)` where the cover is the LP dual, indexed
/// `[partition][vertex]`.
#[pyfunction]
fn optimal_weighting_with_certificate(
    g: &PyHypergraph,
) -> PyResult<(PyWeighting, f64, Vec<Vec<f64>>)> {
    let opt = weighting::optimal_weighting_with_certificate(&g.inner).map_err(py_err)?;
    let s = opt.s_value();
    Ok((opt.weighting.into(), s, opt.vertex_cover))
}

#[pyfunction]
fn s_value(g: &PyHypergraph) -> PyResult<f64> {
    weighting::s_value(&g.inner).map_err(py_err)
}

/// `(feasible, message)`; the message names the first violation.
#[pyfunction]
fn verify_feasible(g: &PyHypergraph, w: Vec<f64>) -> PyResult<(bool, String)> {
    let f = weighting::verify_feasible(&g.inner, &w).map_err(py_err)?;
    Ok((f.is_feasible(), f.to_string()))
}

fn inputs(m: f64, s: f64, epsilon: f64, sigma2: f64, range: f64) -> BoundInputs {
    BoundInputs::new(m, s, epsilon, sigma2, range)
}

#[pyfunction]
#[pyo3(name = "bernstein_tail")]
fn py_bernstein_tail(m: f64, epsilon: f64, sigma2: f64, range: f64) -> PyResult<f64> {
    inputs(m, m, epsilon, sigma2, range)
        .bernstein_tail()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(name = "chromatic_tail")]
fn py_chromatic_tail(
    m: f64,
    chi_star: f64,
    epsilon: f64,
    sigma2: f64,
    range: f64,
) -> PyResult<f64> {
    inputs(m, m, epsilon, sigma2, range)
        .with_chi_star(chi_star)
        .chromatic_tail()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(name = "weighted_bernstein_tail")]
fn py_weighted_bernstein_tail(s: f64, epsilon: f64, sigma2: f64, range: f64) -> PyResult<f64> {
    inputs(s, s, epsilon, sigma2, range)
        .weighted_bernstein_tail()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(name = "weighted_bennett_tail")]
fn py_weighted_bennett_tail(s: f64, epsilon_sum: f64, sigma2: f64, range: f64) -> PyResult<f64> {
    bounds::weighted_bennett_tail(s, epsilon_sum, sigma2, range).map_err(py_err)
}

fn covering(spec: Option<(usize, f64)>) -> PyResult<CoveringModel> {
    match spec {
        None => Ok(CoveringModel::unit()),
        Some((d, r)) => CoveringModel::linear(d, r).map_err(py_err),
    }
}

/// `linear=(d, R)` selects the linear-class covering number; the default is ℕ ≡ 1.
#[pyfunction]
#[pyo3(signature = (m, epsilon, range, linear=None))]
fn sample_error_bound_iid(
    m: f64,
    epsilon: f64,
    range: f64,
    linear: Option<(usize, f64)>,
) -> PyResult<f64> {
    inputs(m, m, epsilon, 0.0, range)
        .with_covering(covering(linear)?)
        .sample_error_bound_iid()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (m, chi_star, epsilon, range, linear=None))]
fn sample_error_bound_eqw(
    m: f64,
    chi_star: f64,
    epsilon: f64,
    range: f64,
    linear: Option<(usize, f64)>,
) -> PyResult<f64> {
    inputs(m, m, epsilon, 0.0, range)
        .with_chi_star(chi_star)
        .with_covering(covering(linear)?)
        .sample_error_bound_eqw()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (s, epsilon, range, linear=None))]
fn sample_error_bound_weighted(
    s: f64,
    epsilon: f64,
    range: f64,
    linear: Option<(usize, f64)>,
) -> PyResult<f64> {
    inputs(s, s, epsilon, 0.0, range)
        .with_covering(covering(linear)?)
        .sample_error_bound_weighted()
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(name = "defect_single_bound")]
fn py_defect_single_bound(s: f64, epsilon: f64, range: f64) -> PyResult<f64> {
    bounds::defect_single_bound(s, epsilon, range).map_err(py_err)
}

#[pyfunction]
fn covering_number_linear(d: usize, radius_bound: f64, tau: f64) -> PyResult<f64> {
    let model = CoveringModel::linear(d, radius_bound).map_err(py_err)?;
    bounds::covering_number_linear(&model, tau).map_err(py_err)
}

fn examples(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> PyResult<Vec<Example>> {
    if xs.len() != ys.len() {
        return Err(PyValueError::new_err(format!(
            "{} feature rows but {} labels",
            xs.len(),
            ys.len()
        )));
    }
    Ok(xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| Example { x, y })
        .collect())
}

/// Weighted least squares over `‖β‖₁ <= R`. Returns
/// `(coefficients, stationarity, path)`; `solver` is `auto`,
/// `closed_form` or `iterative`.
#[pyfunction]
#[pyo3(signature = (xs, ys, weights, normalizer, radius, solver="auto"))]
fn weighted_erm(
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    weights: Vec<f64>,
    normalizer: f64,
    radius: f64,
    solver: &str,
) -> PyResult<(Vec<f64>, f64, String)> {
    let solver = match solver {
        "auto" => Solver::Auto,
        "closed_form" => Solver::ClosedForm,
        "iterative" => Solver::Iterative,
        other => return Err(PyValueError::new_err(format!("unknown solver `{other}`"))),
    };
    let data = examples(xs, ys)?;
    let fit = learner::weighted_erm_with(
        &data,
        &weights,
        normalizer,
        radius,
        &FitOptions {
            solver,
            ..Default::default()
        },
    )
    .map_err(py_err)?;
    let path = match fit.path {
        FitPath::ClosedForm => "closed_form",
        FitPath::Iterative => "iterative",
    };
    Ok((
        fit.hypothesis.coefficients,
        fit.stationarity,
        path.to_string(),
    ))
}

#[pyfunction]
fn empirical_weighted_risk(
    coefficients: Vec<f64>,
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    weights: Vec<f64>,
    normalizer: f64,
) -> PyResult<f64> {
    let f = learner::Hypothesis {
        coefficients,
        norm_bound: f64::INFINITY,
    };
    learner::weighted_risk(&f, &examples(xs, ys)?, &weights, normalizer).map_err(py_err)
}

/// Draws a networked sample; returns `(xs, ys)` with one row per edge.
#[pyfunction]
fn sample_networked(
    g: &PyHypergraph,
    model_json: &str,
    seed: u64,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let model: GenerativeModel = from_json(model_json, "model")?;
    let sample = simulator::sample_networked(&g.inner, &model, seed).map_err(py_err)?;
    Ok(sample.examples.into_iter().map(|z| (z.x, z.y)).unzip())
}

/// Both sides of the weighted MGF inequality by exact enumeration.
#[pyfunction]
fn exact_mgf_check(
    g: &PyHypergraph,
    model_json: &str,
    statistic_json: &str,
    w: Vec<f64>,
) -> PyResult<(f64, f64)> {
    let model: GenerativeModel = from_json(model_json, "model")?;
    let statistic: Statistic = from_json(statistic_json, "statistic")?;
    let c = simulator::exact_mgf_check(&g.inner, &model, &statistic, &w).map_err(py_err)?;
    Ok((c.lhs, c.rhs))
}

#[pyfunction]
#[pyo3(signature = (beta, trials, seed=0))]
fn concavity_check(beta: Vec<f64>, trials: usize, seed: u64) -> PyResult<bool> {
    Ok(matches!(
        simulator::concavity_check(&beta, trials, seed).map_err(py_err)?,
        ConcavityOutcome::Pass { .. }
    ))
}

/// Runs a concentration experiment config; returns `(csv, metadata_json)`.
#[pyfunction]
fn concentration_experiment(config_json: &str) -> PyResult<(String, String)> {
    let cfg: ConcentrationConfig = from_json(config_json, "config")?;
    let caps = ExactCaps::from_env().map_err(py_err)?;
    let g = cfg.hypergraph.load(None).map_err(py_err)?;
    let r = simulator::concentration_experiment(&g, &cfg, caps).map_err(py_err)?;
    Ok((r.to_csv(), r.metadata.to_json()))
}

/// Runs an ERM comparison config; returns `(csv, metadata_json)`.
#[pyfunction]
fn erm_comparison_experiment(config_json: &str) -> PyResult<(String, String)> {
    let cfg: ErmConfig = from_json(config_json, "config")?;
    let caps = ExactCaps::from_env().map_err(py_err)?;
    let g = cfg.hypergraph.load(None).map_err(py_err)?;
    let r = simulator::erm_comparison_experiment(&g, &cfg, caps).map_err(py_err)?;
    Ok((r.to_csv(), r.metadata.to_json()))
}

#[pymodule]
#[pyo3(name = "netweight")]
fn netweight_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyWeighting>()?;
    m.add_function(wrap_pyfunction!(independence_number, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_chromatic_number, m)?)?;
    m.add_function(wrap_pyfunction!(eqw_weights, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_matching_weights, m)?)?;
    m.add_function(wrap_pyfunction!(exact_matching_weights, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_weighting, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_weighting_with_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(s_value, m)?)?;
    m.add_function(wrap_pyfunction!(verify_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(py_bernstein_tail, m)?)?;
    m.add_function(wrap_pyfunction!(py_chromatic_tail, m)?)?;
    m.add_function(wrap_pyfunction!(py_weighted_bernstein_tail, m)?)?;
    m.add_function(wrap_pyfunction!(py_weighted_bennett_tail, m)?)?;
    m.add_function(wrap_pyfunction!(sample_error_bound_iid, m)?)?;
    m.add_function(wrap_pyfunction!(sample_error_bound_eqw, m)?)?;
    m.add_function(wrap_pyfunction!(sample_error_bound_weighted, m)?)?;
    m.add_function(wrap_pyfunction!(py_defect_single_bound, m)?)?;
    m.add_function(wrap_pyfunction!(covering_number_linear, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_erm, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_weighted_risk, m)?)?;
    m.add_function(wrap_pyfunction!(sample_networked, m)?)?;
    m.add_function(wrap_pyfunction!(exact_mgf_check, m)?)?;
    m.add_function(wrap_pyfunction!(concavity_check, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(erm_comparison_experiment, m)?)?;
    Ok(())
}
