use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PROB_TOL: f64 = 1e-9;

/// A scalar discrete distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteScalar {
    pub values: Vec<f64>,
    pub probs: Vec<f64>,
}

impl DiscreteScalar {
    pub fn new(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let d = Self { values, probs };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        validate_probs(&self.probs)?;
        if self.values.len() != self.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                found: self.values.len(),
            });
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("discrete values must be finite"));
        }
        Ok(())
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.values[sample_index(&self.probs, rng)]
    }

    pub fn max_abs(&self) -> f64 {
        support(&self.probs)
            .map(|i| self.values[i].abs())
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| v * p)
            .sum()
    }
}

fn validate_probs(probs: &[f64]) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::invalid(
            "a discrete distribution needs at least one atom",
        ));
    }
    if probs.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::invalid("probabilities must be non-negative"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::invalid(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(())
}

fn support(probs: &[f64]) -> impl Iterator<Item = usize> + '_ {
    probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, _)| i)
}

/// Inverse-CDF draw of an atom index from one uniform variate.
pub(crate) fn sample_index<R: Rng>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the accumulated total: last atom with mass
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Feature distribution `ρ_i` of one partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureDistribution {
    /// Uniform on `[0,1]^dim`.
    Uniform { dim: usize },
    /// Finitely many feature vectors with probabilities.
    Discrete {
        atoms: Vec<Vec<f64>>,
        probs: Vec<f64>,
    },
}

impl FeatureDistribution {
    pub fn dim(&self) -> usize {
        match self {
            FeatureDistribution::Uniform { dim } => *dim,
            FeatureDistribution::Discrete { atoms, .. } => atoms.first().map_or(0, Vec::len),
        }
    }

    pub fn atom_count(&self) -> Option<usize> {
        match self {
            FeatureDistribution::Uniform { .. } => None,
            FeatureDistribution::Discrete { atoms, .. } => Some(atoms.len()),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FeatureDistribution::Uniform { dim } => {
                if *dim == 0 {
                    return Err(Error::invalid("uniform feature dimension must be >= 1"));
                }
            }
            FeatureDistribution::Discrete { atoms, probs } => {
                validate_probs(probs)?;
                if atoms.len() != probs.len() {
                    return Err(Error::DimensionMismatch {
                        expected: probs.len(),
                        found: atoms.len(),
                    });
                }
                let d = self.dim();
                if d == 0 || atoms.iter().any(|a| a.len() != d) {
                    return Err(Error::invalid(
                        "discrete atoms must share a positive dimension",
                    ));
                }
                if atoms.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::invalid("feature atoms must be finite"));
                }
            }
        }
        Ok(())
    }

    /// Draws a feature vector, returning the atom index for discrete laws.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> (Vec<f64>, Option<usize>) {
        match self {
            FeatureDistribution::Uniform { dim } => {
                ((0..*dim).map(|_| rng.random()).collect(), None)
            }
            FeatureDistribution::Discrete { atoms, probs } => {
                let i = sample_index(probs, rng);
                (atoms[i].clone(), Some(i))
            }
        }
    }

    /// Per-coordinate `(min, max)` of the support.
    pub fn coordinate_ranges(&self) -> Vec<(f64, f64)> {
        match self {
            FeatureDistribution::Uniform { dim } => vec![(0.0, 1.0); *dim],
            FeatureDistribution::Discrete { atoms, probs } => (0..self.dim())
                .map(|c| {
                    support(probs).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                        (lo.min(atoms[i][c]), hi.max(atoms[i][c]))
                    })
                })
                .collect(),
        }
    }
}

/// Additive label noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Noise {
    #[default]
    None,
    /// Uniform on `(−half_width, half_width)`.
    Uniform {
        half_width: f64,
    },
    Discrete {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
}

impl Noise {
    fn validate(&self) -> Result<()> {
        match self {
            Noise::None => Ok(()),
            Noise::Uniform { half_width } => {
                if !(*half_width > 0.0) || !half_width.is_finite() {
                    return Err(Error::invalid("uniform noise half-width must be positive"));
                }
                Ok(())
            }
            Noise::Discrete { values, probs } => {
                DiscreteScalar::new(values.clone(), probs.clone()).map(|_| ())
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Noise::None => 0.0,
            Noise::Uniform { half_width } => half_width * (2.0 * rng.random::<f64>() - 1.0),
            Noise::Discrete { values, probs } => values[sample_index(probs, rng)],
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            Noise::None => 0.0,
            Noise::Uniform { half_width } => *half_width,
            Noise::Discrete { values, probs } => {
                support(probs).map(|i| values[i].abs()).fold(0.0, f64::max)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Noise::None | Noise::Uniform { .. } => 0.0,
            Noise::Discrete { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Noise::None => 0.0,
            Noise::Uniform { half_width } => half_width * half_width / 3.0,
            Noise::Discrete { values, probs } => {
                let mu = self.mean();
                values
                    .iter()
                    .zip(probs)
                    .map(|(v, p)| p * (v - mu) * (v - mu))
                    .sum()
            }
        }
    }

    /// Atoms `(value, prob)` when the noise is discrete (or absent).
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Noise::None => Some(vec![(0.0, 1.0)]),
            Noise::Uniform { .. } => None,
            Noise::Discrete { values, probs } => Some(
                values
                    .iter()
                    .zip(probs)
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(&v, &p)| (v, p))
                    .collect(),
            ),
        }
    }
}

/// Conditional label law `ρ_{y|x}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelModel {
    /// `y = ⟨β*, x⟩ + noise`.
    Linear {
        beta: Vec<f64>,
        #[serde(default)]
        noise: Noise,
    },
    /// One label distribution per tuple of feature atoms (all partitions
    /// discrete). Tuples are enumerated mixed-radix, partition 0 most
    /// significant.
    Table { outcomes: Vec<DiscreteScalar> },
}

/// The data-generating distribution of a networked sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerativeModel {
    pub features: Vec<FeatureDistribution>,
    pub label: LabelModel,
}

impl GenerativeModel {
    pub fn new(features: Vec<FeatureDistribution>, label: LabelModel) -> Result<Self> {
        let model = Self { features, label };
        model.validate()?;
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.features.len()
    }

    /// Dimension of a composed feature vector.
    pub fn dim(&self) -> usize {
        self.features.iter().map(FeatureDistribution::dim).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::invalid("model needs at least one partition"));
        }
        for f in &self.features {
            f.validate()?;
        }
        match &self.label {
            LabelModel::Linear { beta, noise } => {
                if beta.len() != self.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        found: beta.len(),
                    });
                }
                if beta.iter().any(|b| !b.is_finite()) {
                    return Err(Error::invalid("beta must be finite"));
                }
                noise.validate()?;
            }
            LabelModel::Table { outcomes } => {
                let tuples = self.atom_tuple_count().ok_or_else(|| {
                    Error::invalid("a label table needs discrete features in every partition")
                })?;
                if outcomes.len() != tuples {
                    return Err(Error::DimensionMismatch {
                        expected: tuples,
                        found: outcomes.len(),
                    });
                }
                for o in outcomes {
                    o.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Number of joint atom tuples, when every partition is discrete.
    pub fn atom_tuple_count(&self) -> Option<usize> {
        self.features
            .iter()
            .map(FeatureDistribution::atom_count)
            .try_fold(1usize, |acc, n| n.map(|n| acc * n))
    }

    /// Mixed-radix index of an atom tuple.
    pub fn tuple_index(&self, atoms: &[usize]) -> usize {
        atoms
            .iter()
            .zip(&self.features)
            .fold(0, |acc, (&a, f)| acc * f.atom_count().unwrap_or(1) + a)
    }

    /// Draws a label for a composed feature vector.
    pub fn sample_label<R: Rng>(&self, x: &[f64], atoms: Option<&[usize]>, rng: &mut R) -> f64 {
        match &self.label {
            LabelModel::Linear { beta, noise } => dot(beta, x) + noise.sample(rng),
            LabelModel::Table { outcomes } => {
                let atoms = atoms.expect("table labels require atom indices");
                outcomes[self.tuple_index(atoms)].sample(rng)
            }
        }
    }

    /// Label atoms `(value, prob)` given the features, when the label law
    /// is discrete.
    pub fn label_atoms(&self, x: &[f64], atoms: Option<&[usize]>) -> Option<Vec<(f64, f64)>> {
        match &self.label {
            LabelModel::Linear { beta, noise } => {
                let base = dot(beta, x);
                noise
                    .atoms()
                    .map(|a| a.into_iter().map(|(v, p)| (base + v, p)).collect())
            }
            LabelModel::Table { outcomes } => {
                let o = &outcomes[self.tuple_index(atoms?)];
                Some(
                    o.values
                        .iter()
                        .zip(&o.probs)
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(&v, &p)| (v, p))
                        .collect(),
                )
            }
        }
    }

    /// Support of one example `(x, y)` with probabilities, when every part
    /// of the model is discrete.
    pub fn example_support(&self) -> Option<Vec<(f64, Vec<f64>, f64)>> {
        let tuples = self.atom_tuple_count()?;
        let counts: Vec<usize> = self
            .features
            .iter()
            .map(|f| f.atom_count().unwrap())
            .collect();
        let mut out = Vec::new();
        let mut atoms = vec![0usize; self.k()];
        for _ in 0..tuples {
            let mut prob = 1.0;
            let mut x = Vec::with_capacity(self.dim());
            for (f, &a) in self.features.iter().zip(&atoms) {
                if let FeatureDistribution::Discrete { atoms: vs, probs } = f {
                    prob *= probs[a];
                    x.extend_from_slice(&vs[a]);
                }
            }
            if prob > 0.0 {
                for (y, py) in self.label_atoms(&x, Some(&atoms))? {
                    out.push((prob * py, x.clone(), y));
                }
            }
            advance(&mut atoms, &counts);
        }
        Some(out)
    }

    /// `sup |y|` over the support.
    pub fn label_bound(&self) -> f64 {
        match &self.label {
            LabelModel::Linear { beta, noise } => {
                let ranges: Vec<(f64, f64)> = self
                    .features
                    .iter()
                    .flat_map(|f| f.coordinate_ranges())
                    .collect();
                let hi: f64 = beta
                    .iter()
                    .zip(&ranges)
                    .map(|(b, (lo, hi))| (b * lo).max(b * hi))
                    .sum();
                let lo: f64 = beta
                    .iter()
                    .zip(&ranges)
                    .map(|(b, (lo, hi))| (b * lo).min(b * hi))
                    .sum();
                hi.abs().max(lo.abs()) + noise.max_abs()
            }
            LabelModel::Table { outcomes } => outcomes
                .iter()
                .map(DiscreteScalar::max_abs)
                .fold(0.0, f64::max),
        }
    }

    /// `sup ‖x‖_∞` over the support.
    pub fn feature_bound(&self) -> f64 {
        self.features
            .iter()
            .flat_map(|f| f.coordinate_ranges())
            .map(|(lo, hi)| lo.abs().max(hi.abs()))
            .fold(0.0, f64::max)
    }
}

/// Odometer step over mixed-radix digits, least significant last.
pub(crate) fn advance(digits: &mut [usize], radix: &[usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return;
        }
        digits[i] = 0;
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
