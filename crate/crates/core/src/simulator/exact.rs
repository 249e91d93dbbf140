//! Exact checks of the weighted moment-generating-function inequality
//! `E exp(Σ w_i ξ(z_i)) <= Π (E e^{ξ(z)})^{w_i}` and of concavity of the
//! weighted geometric mean.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{advance, GenerativeModel};
use super::statistic::Statistic;
use crate::error::{Error, Result};
use crate::hypergraph::KPartiteHypergraph;
use crate::rng::StreamFactory;
use crate::weighting::verify_feasible;

/// Most vertex-feature configurations an exact check will enumerate.
pub const ENUMERATION_CAP: usize = 10_000_000;

/// Both sides of the MGF inequality, computed exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Number of joint vertex-feature assignments enumerated.
    pub configurations: usize,
}

impl MgfCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Enumerates every assignment of atoms to the non-isolated vertices.
///
/// Labels are conditionally independent given the features, so for a fixed
/// assignment the label expectation factorises over edges; each edge's
/// factor `E_{y|x} exp(w_i ξ(x, y))` is tabulated once per atom tuple.
pub fn exact_mgf_check(
    g: &KPartiteHypergraph,
    model: &GenerativeModel,
    statistic: &Statistic,
    w: &[f64],
) -> Result<MgfCheck> {
    model.validate()?;
    if model.k() != g.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: model.k(),
        });
    }
    if statistic.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: statistic.dim(),
        });
    }
    let feasibility = verify_feasible(g, w)?;
    if !feasibility.is_feasible() {
        return Err(Error::Infeasible(feasibility.to_string()));
    }
    let support = model
        .example_support()
        .ok_or_else(|| Error::invalid("exact enumeration needs discrete features and labels"))?;

    let radix: Vec<usize> = model
        .features
        .iter()
        .map(|f| f.atom_count().unwrap())
        .collect();
    let tuples = model.atom_tuple_count().unwrap();

    // composed features and label atoms per atom tuple
    let mut tuple_x = Vec::with_capacity(tuples);
    let mut tuple_labels = Vec::with_capacity(tuples);
    let mut digits = vec![0usize; g.k()];
    for _ in 0..tuples {
        let mut x = Vec::with_capacity(model.dim());
        for (f, &a) in model.features.iter().zip(&digits) {
            if let super::model::FeatureDistribution::Discrete { atoms, .. } = f {
                x.extend_from_slice(&atoms[a]);
            }
        }
        let labels = model
            .label_atoms(&x, Some(&digits))
            .ok_or_else(|| Error::invalid("exact enumeration needs discrete labels"))?;
        tuple_x.push(x);
        tuple_labels.push(labels);
        advance(&mut digits, &radix);
    }

    let edge_tables: Vec<Vec<f64>> = w
        .iter()
        .map(|&wi| {
            (0..tuples)
                .map(|t| {
                    tuple_labels[t]
                        .iter()
                        .map(|&(y, p)| p * (wi * statistic.eval_parts(&tuple_x[t], y)).exp())
                        .sum()
                })
                .collect()
        })
        .collect();

    // active vertices and, per edge, the positions of its vertices
    let degrees = g.degrees();
    let mut position: Vec<Vec<Option<usize>>> =
        degrees.iter().map(|d| vec![None; d.len()]).collect();
    let mut active_radix = Vec::new();
    let mut active_probs: Vec<&[f64]> = Vec::new();
    for (i, d) in degrees.iter().enumerate() {
        for (v, &deg) in d.iter().enumerate() {
            if deg > 0 {
                position[i][v] = Some(active_radix.len());
                active_radix.push(radix[i]);
                if let super::model::FeatureDistribution::Discrete { probs, .. } =
                    &model.features[i]
                {
                    active_probs.push(probs);
                }
            }
        }
    }
    let configurations = active_radix
        .iter()
        .try_fold(1usize, |acc, &r| {
            acc.checked_mul(r).filter(|&c| c <= ENUMERATION_CAP)
        })
        .ok_or(Error::InstanceTooLarge {
            what: "exact MGF enumeration",
            size: active_radix
                .iter()
                .fold(1usize, |acc, &r| acc.saturating_mul(r)),
            cap: ENUMERATION_CAP,
        })?;
    let edge_slots: Vec<Vec<usize>> = g
        .edges()
        .map(|edge| {
            edge.iter()
                .enumerate()
                .map(|(i, &v)| position[i][v].expect("edge vertices are active"))
                .collect()
        })
        .collect();

    let mut config = vec![0usize; active_radix.len()];
    let mut lhs = CompensatedSum::default();
    for _ in 0..configurations {
        let prob: f64 = config
            .iter()
            .zip(&active_probs)
            .map(|(&a, p)| p[a])
            .product();
        if prob > 0.0 {
            let mut product = 1.0;
            for (table, slots) in edge_tables.iter().zip(&edge_slots) {
                let t = slots
                    .iter()
                    .zip(&radix)
                    .fold(0, |acc, (&s, &r)| acc * r + config[s]);
                product *= table[t];
            }
            lhs.add(prob * product);
        }
        advance(&mut config, &active_radix);
    }

    let mgf_single: f64 = support
        .iter()
        .map(|(p, x, y)| p * statistic.eval_parts(x, *y).exp())
        .sum();
    let rhs = (w.iter().sum::<f64>() * mgf_single.ln()).exp();

    Ok(MgfCheck {
        lhs: lhs.value(),
        rhs,
        configurations,
    })
}

/// Result of [`concavity_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConcavityOutcome {
    /// Every trial satisfied the inequality; `min_slack` is the smallest
    /// observed `g(λt + (1−λ)t') − (λ g(t) + (1−λ) g(t'))`.
    Pass { trials: usize, min_slack: f64 },
    Violation {
        t: Vec<f64>,
        t_prime: Vec<f64>,
        lambda: f64,
        mixed: f64,
        chord: f64,
    },
}

impl ConcavityOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, ConcavityOutcome::Pass { .. })
    }
}

/// `g(t) = Π t_i^{β_i}`.
pub fn weighted_geometric_mean(beta: &[f64], t: &[f64]) -> f64 {
    beta.iter()
        .zip(t)
        .map(|(b, x)| b * x.ln())
        .sum::<f64>()
        .exp()
}

/// Tests `g(λt + (1−λ)t') >= λ g(t) + (1−λ) g(t') − 1e-12` on random
/// `t, t' ∈ (0, 10]^k`, `λ ∈ [0, 1]`.
pub fn concavity_check(beta: &[f64], trials: usize, seed: u64) -> Result<ConcavityOutcome> {
    if beta.is_empty() || beta.iter().any(|&b| !(b >= 0.0)) {
        return Err(Error::invalid(
            "beta must be a non-empty non-negative vector",
        ));
    }
    if beta.iter().sum::<f64>() > 1.0 + 1e-12 {
        return Err(Error::invalid("beta must sum to at most 1"));
    }
    let mut rng = StreamFactory::new(seed).aux_stream();
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        beta.iter()
            .map(|_| 10.0 * (1.0 - rng.random::<f64>()))
            .collect()
    };
    let mut min_slack = f64::INFINITY;
    for _ in 0..trials {
        let t = draw(&mut rng);
        let t_prime = draw(&mut rng);
        let lambda: f64 = rng.random();
        let mid: Vec<f64> = t
            .iter()
            .zip(&t_prime)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        let mixed = weighted_geometric_mean(beta, &mid);
        let chord = lambda * weighted_geometric_mean(beta, &t)
            + (1.0 - lambda) * weighted_geometric_mean(beta, &t_prime);
        let slack = mixed - chord;
        if slack < -1e-12 {
            return Ok(ConcavityOutcome::Violation {
                t,
                t_prime,
                lambda,
                mixed,
                chord,
            });
        }
        min_slack = min_slack.min(slack);
    }
    Ok(ConcavityOutcome::Pass { trials, min_slack })
}
