use serde::{Deserialize, Serialize};

use super::model::{dot, FeatureDistribution, GenerativeModel, LabelModel};
use super::sampling::Example;
use crate::error::{Error, Result};

/// A bounded function `ξ` on examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Statistic {
    /// `ξ(z) = (⟨β, x⟩ − y)²`.
    SquaredLoss { beta: Vec<f64> },
    /// `ξ(z) = ⟨a, x⟩ + b·y + c`.
    Affine {
        feature_coeffs: Vec<f64>,
        #[serde(default)]
        label_coeff: f64,
        #[serde(default)]
        offset: f64,
    },
}

/// Mean `μ`, variance `σ²` and range `M = sup |ξ − μ|` of a statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub range: f64,
}

impl Statistic {
    pub fn dim(&self) -> usize {
        match self {
            Statistic::SquaredLoss { beta } => beta.len(),
            Statistic::Affine { feature_coeffs, .. } => feature_coeffs.len(),
        }
    }

    pub fn eval(&self, z: &Example) -> f64 {
        self.eval_parts(&z.x, z.y)
    }

    pub fn eval_parts(&self, x: &[f64], y: f64) -> f64 {
        match self {
            Statistic::SquaredLoss { beta } => {
                let r = dot(beta, x) - y;
                r * r
            }
            Statistic::Affine {
                feature_coeffs,
                label_coeff,
                offset,
            } => dot(feature_coeffs, x) + label_coeff * y + offset,
        }
    }

    /// Exact moments under `model`.
    ///
    /// Fully discrete models are enumerated. Affine statistics under a
    /// linear label model use the closed form, since the per-partition
    /// terms and the noise are independent. Anything else has no supported
    /// exact form.
    pub fn moments(&self, model: &GenerativeModel) -> Result<Moments> {
        if self.dim() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: self.dim(),
            });
        }
        if let Some(support) = model.example_support() {
            return Ok(self.enumerated_moments(&support));
        }
        match (self, &model.label) {
            (
                Statistic::Affine {
                    feature_coeffs,
                    label_coeff,
                    offset,
                },
                LabelModel::Linear { beta, noise },
            ) => {
                // ξ = Σ_p ⟨u_p, x_p⟩ + b·noise + c with u = a + bβ
                let u: Vec<f64> = feature_coeffs
                    .iter()
                    .zip(beta)
                    .map(|(a, b)| a + label_coeff * b)
                    .collect();
                let mut mean = *offset;
                let mut variance = 0.0;
                let (mut lo, mut hi) = (*offset, *offset);
                let mut col = 0;
                for f in &model.features {
                    let w = &u[col..col + f.dim()];
                    col += f.dim();
                    let (m, v, l, h) = partition_term(f, w);
                    mean += m;
                    variance += v;
                    lo += l;
                    hi += h;
                }
                let b = *label_coeff;
                mean += b * noise.mean();
                variance += b * b * noise.variance();
                // noise support lies in [−max_abs, max_abs]
                let spread = b.abs() * noise.max_abs();
                lo -= spread;
                hi += spread;
                Ok(Moments {
                    mean,
                    variance,
                    range: (hi - mean).max(mean - lo),
                })
            }
            _ => Err(Error::UnknownMoments(
                "exact moments need a fully discrete model, or an affine statistic with linear labels"
                    .into(),
            )),
        }
    }

    fn enumerated_moments(&self, support: &[(f64, Vec<f64>, f64)]) -> Moments {
        let mean: f64 = support
            .iter()
            .map(|(p, x, y)| p * self.eval_parts(x, *y))
            .sum();
        let variance: f64 = support
            .iter()
            .map(|(p, x, y)| {
                let d = self.eval_parts(x, *y) - mean;
                p * d * d
            })
            .sum();
        let range = support
            .iter()
            .map(|(_, x, y)| (self.eval_parts(x, *y) - mean).abs())
            .fold(0.0, f64::max);
        Moments {
            mean,
            variance,
            range,
        }
    }
}

/// `(mean, variance, min, max)` of `⟨w, x_p⟩` for one partition.
fn partition_term(f: &FeatureDistribution, w: &[f64]) -> (f64, f64, f64, f64) {
    match f {
        FeatureDistribution::Uniform { .. } => {
            let mean = w.iter().sum::<f64>() / 2.0;
            let var = w.iter().map(|c| c * c).sum::<f64>() / 12.0;
            let lo = w.iter().map(|&c| c.min(0.0)).sum();
            let hi = w.iter().map(|&c| c.max(0.0)).sum();
            (mean, var, lo, hi)
        }
        FeatureDistribution::Discrete { atoms, probs } => {
            let vals: Vec<(f64, f64)> = atoms
                .iter()
                .zip(probs)
                .filter(|(_, &p)| p > 0.0)
                .map(|(a, &p)| (dot(w, a), p))
                .collect();
            let mean: f64 = vals.iter().map(|(v, p)| v * p).sum();
            let var = vals.iter().map(|(v, p)| p * (v - mean) * (v - mean)).sum();
            let lo = vals.iter().map(|v| v.0).fold(f64::INFINITY, f64::min);
            let hi = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
            (mean, var, lo, hi)
        }
    }
}
