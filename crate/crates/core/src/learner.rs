//! Weighted least-squares ERM over the ℓ1 ball `{β : ‖β‖₁ <= R}` and risk
//! evaluators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulator::model::dot;
use crate::simulator::{sample_iid, Example, GenerativeModel};
use crate::weighting::Weighting;

/// Slack on the ℓ1 constraint.
pub const NORM_TOL: f64 = 1e-9;

/// Linear predictor `x ↦ ⟨β, x⟩` with `‖β‖₁ <= R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub coefficients: Vec<f64>,
    pub norm_bound: f64,
}

impl Hypothesis {
    pub fn new(coefficients: Vec<f64>, norm_bound: f64) -> Result<Self> {
        if !(norm_bound > 0.0) || !norm_bound.is_finite() {
            return Err(Error::invalid("norm bound R must be positive and finite"));
        }
        let h = Self {
            coefficients,
            norm_bound,
        };
        if h.l1_norm() > norm_bound + NORM_TOL {
            return Err(Error::invalid(format!(
                "‖β‖₁ = {} exceeds R = {norm_bound}",
                h.l1_norm()
            )));
        }
        Ok(h)
    }

    /// The zero predictor.
    pub fn zero(dim: usize, norm_bound: f64) -> Result<Self> {
        Self::new(vec![0.0; dim], norm_bound)
    }

    pub fn dim(&self) -> usize {
        self.coefficients.len()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|b| b.abs()).sum()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        dot(&self.coefficients, x)
    }

    pub fn squared_loss(&self, z: &Example) -> f64 {
        let r = self.predict(&z.x) - z.y;
        r * r
    }
}

/// Which minimisation path [`weighted_erm_with`] takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Normal equations when the constraint does not bind, else projected
    /// gradient warm-started from the projected least-squares point.
    #[default]
    Auto,
    /// Normal equations only; fails when the constraint binds.
    ClosedForm,
    /// Projected gradient only.
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitPath {
    ClosedForm,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub solver: Solver,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub power_iterations: usize,
    /// Start the iterative path at the projected least-squares point
    /// rather than at zero.
    pub warm_start: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            solver: Solver::Auto,
            max_iterations: 100_000,
            tolerance: 1e-8,
            power_iterations: 50,
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub hypothesis: Hypothesis,
    /// `‖β − P(β − ∇E_s(β))‖₂` at the returned point.
    pub stationarity: f64,
    pub iterations: usize,
    pub path: FitPath,
}

/// Weighted Gram system `H = (2/N) Σ w_i x_i x_iᵀ`, `g = (2/N) Σ w_i y_i x_i`,
/// so that `∇E_s(β) = Hβ − g`.
struct Quadratic {
    h: DMatrix<f64>,
    g: DVector<f64>,
    /// `(1/N) Σ w_i y_i²`
    c: f64,
}

impl Quadratic {
    fn build(examples: &[Example], weights: &[f64], normalizer: f64, dim: usize) -> Self {
        let mut h = DMatrix::zeros(dim, dim);
        let mut g = DVector::zeros(dim);
        let mut c = 0.0;
        for (z, &w) in examples.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            let x = DVector::from_column_slice(&z.x);
            h.ger(w, &x, &x, 1.0);
            g.axpy(w * z.y, &x, 1.0);
            c += w * z.y * z.y;
        }
        let scale = 2.0 / normalizer;
        h *= scale;
        g *= scale;
        Self {
            h,
            g,
            c: c / normalizer,
        }
    }

    fn gradient(&self, beta: &DVector<f64>) -> DVector<f64> {
        &self.h * beta - &self.g
    }

    fn objective(&self, beta: &DVector<f64>) -> f64 {
        0.5 * beta.dot(&(&self.h * beta)) - beta.dot(&self.g) + self.c
    }

    fn stationarity(&self, beta: &DVector<f64>, radius: f64) -> f64 {
        let step = beta - self.gradient(beta);
        (beta - project_l1(&step, radius)).norm()
    }

    fn largest_eigenvalue(&self, iterations: usize) -> f64 {
        let d = self.h.nrows();
        let mut v = DVector::from_element(d, 1.0 / (d as f64).sqrt());
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let hv = &self.h * &v;
            let norm = hv.norm();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = v.dot(&hv);
            v = hv / norm;
        }
        lambda.max((&self.h * &v).norm())
    }

    /// Least-squares point via the pseudo-inverse (minimum norm when the
    /// Gram matrix is singular).
    fn least_squares(&self) -> DVector<f64> {
        let scale = self.h.amax().max(f64::MIN_POSITIVE);
        let pinv = self
            .h
            .clone()
            .pseudo_inverse(scale * 1e-12)
            .expect("non-negative epsilon");
        pinv * &self.g
    }
}

/// Euclidean projection onto `{β : ‖β‖₁ <= radius}` by the sort-based
/// soft-threshold rule.
pub fn project_l1(v: &DVector<f64>, radius: f64) -> DVector<f64> {
    if v.iter().map(|x| x.abs()).sum::<f64>() <= radius {
        return v.clone();
    }
    let mut u: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumulative += uj;
        let t = (cumulative - radius) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.map(|x| x.signum() * (x.abs() - theta).max(0.0))
}

fn check_inputs(examples: &[Example], weights: &[f64], normalizer: f64) -> Result<usize> {
    if examples.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    if weights.len() != examples.len() {
        return Err(Error::DimensionMismatch {
            expected: examples.len(),
            found: weights.len(),
        });
    }
    let dim = examples[0].x.len();
    if let Some(z) = examples.iter().find(|z| z.x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: z.x.len(),
        });
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::invalid("weights must be finite and non-negative"));
    }
    if !(weights.iter().sum::<f64>() > 0.0) {
        return Err(Error::invalid("total weight is zero"));
    }
    if !(normalizer > 0.0) || !normalizer.is_finite() {
        return Err(Error::invalid("normalizer must be positive"));
    }
    if examples
        .iter()
        .any(|z| !z.y.is_finite() || z.x.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::invalid("examples must be finite"));
    }
    Ok(dim)
}

/// `f_{Z_s} = argmin_{‖β‖₁ <= R} (1/N) Σ w_i (⟨β, x_i⟩ − y_i)²`.
pub fn weighted_erm(examples: &[Example], w: &Weighting, radius: f64) -> Result<Hypothesis> {
    Ok(weighted_erm_with(
        examples,
        &w.weights,
        w.normalizer,
        radius,
        &FitOptions::default(),
    )?
    .hypothesis)
}

pub fn weighted_erm_with(
    examples: &[Example],
    weights: &[f64],
    normalizer: f64,
    radius: f64,
    options: &FitOptions,
) -> Result<Fit> {
    let dim = check_inputs(examples, weights, normalizer)?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid("norm bound R must be positive and finite"));
    }
    let q = Quadratic::build(examples, weights, normalizer, dim);

    let needs_ls = options.solver != Solver::Iterative || options.warm_start;
    let ls = needs_ls.then(|| q.least_squares());
    if let Some(ls) = &ls {
        if options.solver != Solver::Iterative && ls.lp_norm(1) <= radius {
            return Ok(Fit {
                stationarity: q.stationarity(ls, radius),
                hypothesis: Hypothesis {
                    coefficients: ls.iter().copied().collect(),
                    norm_bound: radius,
                },
                iterations: 0,
                path: FitPath::ClosedForm,
            });
        }
        if options.solver == Solver::ClosedForm {
            return Err(Error::invalid(format!(
                "closed form needs an unbinding constraint, but ‖β_ls‖₁ = {} > R = {radius}",
                ls.lp_norm(1)
            )));
        }
    }

    let start = match (&ls, options.warm_start) {
        (Some(ls), true) => project_l1(ls, radius),
        _ => DVector::zeros(dim),
    };
    let (beta, stationarity, iterations) = projected_gradient(&q, start, radius, options);
    Ok(Fit {
        hypothesis: Hypothesis {
            coefficients: beta.iter().copied().collect(),
            norm_bound: radius,
        },
        stationarity,
        iterations,
        path: FitPath::Iterative,
    })
}

/// How often the iterate tries to jump to the exact optimum of its face.
const POLISH_EVERY: usize = 500;

fn projected_gradient(
    q: &Quadratic,
    mut beta: DVector<f64>,
    radius: f64,
    options: &FitOptions,
) -> (DVector<f64>, f64, usize) {
    let mut lipschitz = q.largest_eigenvalue(options.power_iterations);
    if lipschitz <= 0.0 {
        // zero Gram matrix: the objective is linear in nothing, any feasible β is optimal
        return (beta.clone(), q.stationarity(&beta, radius), 0);
    }
    let mut objective = q.objective(&beta);
    let mut stationarity = q.stationarity(&beta, radius);
    let mut iterations = 0;
    while stationarity > options.tolerance && iterations < options.max_iterations {
        iterations += 1;
        let candidate = project_l1(&(&beta - q.gradient(&beta) / lipschitz), radius);
        let value = q.objective(&candidate);
        if value > objective + 1e-15 * objective.abs().max(1.0) {
            lipschitz *= 2.0;
            continue;
        }
        beta = candidate;
        objective = value;
        if iterations % POLISH_EVERY == 0 || iterations == options.max_iterations {
            if let Some(p) = polish_face(q, &beta, radius) {
                let s = q.stationarity(&p, radius);
                if s < q.stationarity(&beta, radius) {
                    beta = p;
                    objective = q.objective(&beta);
                }
            }
        }
        stationarity = q.stationarity(&beta, radius);
    }
    // the tolerance bounds the step residual, not the distance to the
    // optimum; finish on the face when that is exact
    if let Some(p) = polish_face(q, &beta, radius) {
        let s = q.stationarity(&p, radius);
        if s < stationarity {
            beta = p;
            stationarity = s;
        }
    }
    (beta, stationarity, iterations)
}

/// Solves the objective exactly on the face of the ℓ1 ball selected by the
/// current support and signs; `None` if the result leaves that face.
fn polish_face(q: &Quadratic, beta: &DVector<f64>, radius: f64) -> Option<DVector<f64>> {
    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j].abs() > 1e-14).collect();
    if support.is_empty() {
        return None;
    }
    let on_boundary = beta.lp_norm(1) >= radius * (1.0 - 1e-12);
    let n = support.len() + usize::from(on_boundary);
    let mut kkt = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            kkt[(a, b)] = q.h[(i, j)];
        }
        rhs[a] = q.g[i];
        if on_boundary {
            let sign = beta[i].signum();
            kkt[(a, n - 1)] = sign;
            kkt[(n - 1, a)] = sign;
        }
    }
    if on_boundary {
        rhs[n - 1] = radius;
    }
    let solution = kkt.lu().solve(&rhs)?;
    let mut out = DVector::zeros(beta.len());
    for (a, &i) in support.iter().enumerate() {
        if solution[a].signum() != beta[i].signum() {
            return None;
        }
        out[i] = solution[a];
    }
    (out.lp_norm(1) <= radius * (1.0 + 1e-12)).then_some(out)
}

/// `E_s(f) = (1/N) Σ w_i (f(x_i) − y_i)²`.
pub fn empirical_weighted_risk(f: &Hypothesis, examples: &[Example], w: &Weighting) -> Result<f64> {
    weighted_risk(f, examples, &w.weights, w.normalizer)
}

pub fn weighted_risk(
    f: &Hypothesis,
    examples: &[Example],
    weights: &[f64],
    normalizer: f64,
) -> Result<f64> {
    if weights.len() != examples.len() {
        return Err(Error::DimensionMismatch {
            expected: examples.len(),
            found: weights.len(),
        });
    }
    if !(normalizer > 0.0) {
        return Err(Error::invalid("normalizer must be positive"));
    }
    check_dims(f, examples)?;
    Ok(examples
        .iter()
        .zip(weights)
        .map(|(z, w)| w * f.squared_loss(z))
        .sum::<f64>()
        / normalizer)
}

/// `E_Z(f) = (1/m) Σ (f(x_i) − y_i)²`.
pub fn empirical_risk(f: &Hypothesis, examples: &[Example]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::EmptyEdgeSet);
    }
    check_dims(f, examples)?;
    Ok(examples.iter().map(|z| f.squared_loss(z)).sum::<f64>() / examples.len() as f64)
}

fn check_dims(f: &Hypothesis, examples: &[Example]) -> Result<()> {
    match examples.iter().find(|z| z.x.len() != f.dim()) {
        Some(z) => Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: z.x.len(),
        }),
        None => Ok(()),
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

impl RiskEstimate {
    fn from_values(values: impl Iterator<Item = f64>) -> Self {
        let values: Vec<f64> = values.collect();
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        Self {
            estimate: mean,
            std_error: (var / n as f64).sqrt(),
            n,
        }
    }
}

fn test_draws(
    model: &GenerativeModel,
    dim: usize,
    n_test: usize,
    seed: u64,
) -> Result<Vec<Example>> {
    if n_test < 2 {
        return Err(Error::invalid("n_test must be at least 2"));
    }
    if model.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: dim,
        });
    }
    sample_iid(model, n_test, seed)
}

/// Monte Carlo estimate of `E(f) = ∫ (f(x) − y)² dρ` on fresh i.i.d. draws.
pub fn expected_risk_estimate(
    f: &Hypothesis,
    model: &GenerativeModel,
    n_test: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    let draws = test_draws(model, f.dim(), n_test, seed)?;
    Ok(RiskEstimate::from_values(
        draws.iter().map(|z| f.squared_loss(z)),
    ))
}

/// `E(f̂) − E(f_H)` estimated on one shared test draw.
pub fn sample_error_estimate(
    f_hat: &Hypothesis,
    f_h: &Hypothesis,
    model: &GenerativeModel,
    n_test: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if f_hat.dim() != f_h.dim() {
        return Err(Error::DimensionMismatch {
            expected: f_h.dim(),
            found: f_hat.dim(),
        });
    }
    let draws = test_draws(model, f_hat.dim(), n_test, seed)?;
    Ok(RiskEstimate::from_values(
        draws
            .iter()
            .map(|z| f_hat.squared_loss(z) - f_h.squared_loss(z)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub empirical_weighted: f64,
    pub empirical_unweighted: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_estimate: Option<RiskEstimate>,
}

/// Empirical risks, plus the expected risk when a model is supplied.
pub fn risk_report(
    f: &Hypothesis,
    examples: &[Example],
    w: &Weighting,
    model: Option<(&GenerativeModel, usize, u64)>,
) -> Result<RiskReport> {
    Ok(RiskReport {
        empirical_weighted: empirical_weighted_risk(f, examples, w)?,
        empirical_unweighted: empirical_risk(f, examples)?,
        expected_estimate: model
            .map(|(m, n, seed)| expected_risk_estimate(f, m, n, seed))
            .transpose()?,
    })
}
