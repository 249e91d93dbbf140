//! Closed-form tail and sample-error bounds.
//!
//! Everything is evaluated as a log first and exponentiated at the end, so
//! large sample sizes underflow to a clean `0.0` rather than NaN. The `log_*`
//! variants expose the exponent directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Covering-number model `ℕ(H, τ)` for the hypothesis class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoveringModel {
    /// Breakpoints `(radius, count)`: `ℕ(τ)` is the count of the entry with
    /// the largest radius `<= τ`. Radii ascending, counts non-increasing.
    Table { entries: Vec<(f64, u64)> },
    /// `{x ↦ ⟨β, x⟩ : ‖β‖₁ <= R}` over `x ∈ [0,1]^d`.
    Linear { dim: usize, radius_bound: f64 },
}

impl CoveringModel {
    /// `ℕ ≡ 1` for every radius.
    pub fn unit() -> Self {
        CoveringModel::Table {
            entries: vec![(0.0, 1)],
        }
    }

    pub fn linear(dim: usize, radius_bound: f64) -> Result<Self> {
        let model = CoveringModel::Linear { dim, radius_bound };
        model.validate()?;
        Ok(model)
    }

    pub fn table(entries: Vec<(f64, u64)>) -> Result<Self> {
        let model = CoveringModel::Table { entries };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoveringModel::Table { entries } => {
                if entries.is_empty() {
                    return Err(Error::invalid("covering table is empty"));
                }
                for pair in entries.windows(2) {
                    if !(pair[0].0 < pair[1].0) || pair[1].1 > pair[0].1 {
                        return Err(Error::invalid(
                            "covering table must have ascending radii and non-increasing counts",
                        ));
                    }
                }
                if entries.iter().any(|&(r, c)| c == 0 || !(r >= 0.0)) {
                    return Err(Error::invalid("covering counts must be >= 1, radii >= 0"));
                }
                Ok(())
            }
            CoveringModel::Linear { dim, radius_bound } => {
                if *dim == 0 || !(*radius_bound > 0.0) || !radius_bound.is_finite() {
                    return Err(Error::invalid("linear covering needs d >= 1 and R > 0"));
                }
                Ok(())
            }
        }
    }

    /// `ln ℕ(H, τ)`.
    pub fn log_count(&self, tau: f64) -> Result<f64> {
        if !(tau > 0.0) {
            return Err(Error::invalid(format!(
                "covering radius must be positive, got {tau}"
            )));
        }
        match self {
            CoveringModel::Table { entries } => entries
                .iter()
                .rev()
                .find(|&&(r, _)| r <= tau)
                .map(|&(_, c)| (c as f64).ln())
                .ok_or_else(|| {
                    Error::invalid(format!("covering table has no entry for radius {tau}"))
                }),
            CoveringModel::Linear { dim, radius_bound } => {
                if *radius_bound <= tau {
                    // a single disk at the origin already covers the class
                    Ok(0.0)
                } else {
                    Ok(*dim as f64 * (1.0 + radius_bound / tau).ceil().ln())
                }
            }
        }
    }

    /// `ℕ(H, τ)`; saturates at `f64::INFINITY`.
    pub fn count(&self, tau: f64) -> Result<f64> {
        let log = self.log_count(tau)?;
        Ok(match self {
            CoveringModel::Table { entries } => entries
                .iter()
                .rev()
                .find(|&&(r, _)| r <= tau)
                .map_or(log.exp(), |&(_, c)| c as f64),
            CoveringModel::Linear { dim, radius_bound } if *radius_bound > tau => {
                let base = (1.0 + radius_bound / tau).ceil();
                i32::try_from(*dim).map_or(f64::INFINITY, |d| base.powi(d))
            }
            CoveringModel::Linear { .. } => 1.0,
        })
    }
}

/// `ℕ(H, τ)` for the linear class: `1` when `R <= τ`, otherwise
/// `⌈1 + R/τ⌉^d`.
pub fn covering_number_linear(model: &CoveringModel, tau: f64) -> Result<f64> {
    match model {
        CoveringModel::Linear { .. } => model.count(tau),
        _ => Err(Error::invalid(
            "covering_number_linear needs a linear-class model",
        )),
    }
}

/// Inputs shared by the tail and sample-error evaluators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    /// Sample size `m`.
    pub m: f64,
    /// s-value of the weighting.
    pub s: f64,
    pub epsilon: f64,
    pub sigma2: f64,
    /// Range bound `M`.
    pub range: f64,
    /// Fractional chromatic number, when known.
    pub chi_star: Option<f64>,
    pub covering: CoveringModel,
}

impl BoundInputs {
    pub fn new(m: f64, s: f64, epsilon: f64, sigma2: f64, range: f64) -> Self {
        Self {
            m,
            s,
            epsilon,
            sigma2,
            range,
            chi_star: None,
            covering: CoveringModel::unit(),
        }
    }

    pub fn with_chi_star(mut self, chi_star: f64) -> Self {
        self.chi_star = Some(chi_star);
        self
    }

    pub fn with_covering(mut self, covering: CoveringModel) -> Self {
        self.covering = covering;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.range > 0.0) {
            return Err(Error::invalid(format!(
                "M must be positive, got {}",
                self.range
            )));
        }
        if !(self.sigma2 >= 0.0) || self.sigma2 > self.range * self.range * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "sigma^2 = {} must lie in [0, M^2 = {}]",
                self.sigma2,
                self.range * self.range
            )));
        }
        if !(self.m > 0.0) || !(self.s > 0.0) {
            return Err(Error::invalid("m and s must be positive"));
        }
        if self.s > self.m * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "s = {} exceeds m = {}",
                self.s, self.m
            )));
        }
        if let Some(chi) = self.chi_star {
            if !(chi >= 1.0 - 1e-12) {
                return Err(Error::invalid(format!("chi* must be >= 1, got {chi}")));
            }
        }
        self.covering.validate()
    }

    fn chi(&self) -> Result<f64> {
        self.chi_star.ok_or(Error::ChromaticUnavailable)
    }

    fn bernstein_denominator(&self) -> f64 {
        2.0 * (self.sigma2 + self.range * self.epsilon / 3.0)
    }

    /// Tail exponent `n ε² / (2(σ² + Mε/3))` at effective size `n`.
    fn log_bernstein_at(&self, n: f64) -> Result<f64> {
        self.validate()?;
        Ok(-(n * self.epsilon * self.epsilon) / self.bernstein_denominator())
    }

    pub fn log_bernstein_tail(&self) -> Result<f64> {
        self.log_bernstein_at(self.m)
    }

    /// `exp(−mε² / (2(σ² + Mε/3)))` for an i.i.d. sample of size `m`.
    pub fn bernstein_tail(&self) -> Result<f64> {
        Ok(self.log_bernstein_tail()?.exp())
    }

    pub fn log_chromatic_tail(&self) -> Result<f64> {
        self.validate()?;
        let chi = self.chi()?;
        let e = self.epsilon;
        Ok(-(8.0 * self.m * e * e) / (25.0 * chi * (self.sigma2 + self.range * e / 3.0)))
    }

    /// `exp(−8mε² / (25χ*(σ² + Mε/3)))` for the unweighted average of a
    /// networked sample.
    pub fn chromatic_tail(&self) -> Result<f64> {
        Ok(self.log_chromatic_tail()?.exp())
    }

    pub fn log_weighted_bernstein_tail(&self) -> Result<f64> {
        self.log_bernstein_at(self.s)
    }

    /// `exp(−sε² / (2(σ² + Mε/3)))` for the `s`-normalised weighted
    /// average under an optimal weighting.
    pub fn weighted_bernstein_tail(&self) -> Result<f64> {
        Ok(self.log_weighted_bernstein_tail()?.exp())
    }

    fn log_prefactor(&self) -> Result<f64> {
        self.covering.log_count(self.epsilon / (12.0 * self.range))
    }

    fn log_sample_error_at(&self, rate: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.log_prefactor()? - rate * self.epsilon / self.range.powi(4))
    }

    pub fn log_sample_error_bound_iid(&self) -> Result<f64> {
        self.log_sample_error_at(self.m / 300.0)
    }

    /// `ℕ(H, ε/12M) · exp(−mε / (300 M⁴))`.
    pub fn sample_error_bound_iid(&self) -> Result<f64> {
        Ok(self.log_sample_error_bound_iid()?.exp())
    }

    pub fn log_sample_error_bound_eqw(&self) -> Result<f64> {
        self.validate()?;
        let chi = self.chi()?;
        self.log_sample_error_at(3.0 * self.m / (1400.0 * chi))
    }

    /// `ℕ(H, ε/12M) · exp(−3mε / (1400 χ* M⁴))`.
    pub fn sample_error_bound_eqw(&self) -> Result<f64> {
        Ok(self.log_sample_error_bound_eqw()?.exp())
    }

    pub fn log_sample_error_bound_weighted(&self) -> Result<f64> {
        self.log_sample_error_at(self.s / 300.0)
    }

    /// `ℕ(H, ε/12M) · exp(−sε / (300 M⁴))`.
    pub fn sample_error_bound_weighted(&self) -> Result<f64> {
        Ok(self.log_sample_error_bound_weighted()?.exp())
    }
}

/// `h(a) = (1+a) ln(1+a) − a`.
pub fn bennett_h(a: f64) -> f64 {
    (1.0 + a) * a.ln_1p() - a
}

/// Bennett-form tail for the weighted *sum*:
/// `Pr(Σ w_i (ξ_i − μ) >= ε) <= exp(−(sσ²/M²) h(Mε / (sσ²)))`.
///
/// With `σ² = 0` the variable is almost surely `μ`, so the bound is `0`
/// for `ε > 0` and `1` at `ε = 0`.
pub fn weighted_bennett_tail(s: f64, epsilon_sum: f64, sigma2: f64, range: f64) -> Result<f64> {
    if !(s > 0.0) || !(range > 0.0) || !(epsilon_sum >= 0.0) || !(sigma2 >= 0.0) {
        return Err(Error::invalid(
            "Bennett tail needs s > 0, M > 0, ε >= 0, σ² >= 0",
        ));
    }
    if sigma2 == 0.0 {
        return Ok(if epsilon_sum > 0.0 { 0.0 } else { 1.0 });
    }
    let v = s * sigma2;
    Ok((-(v / (range * range)) * bennett_h(range * epsilon_sum / v)).exp())
}

/// Sum-form Bernstein bound `exp(−ε² / (2(sσ² + Mε/3)))` implied by the
/// Bennett form through `h(a) >= 3a² / (6 + 2a)`.
pub fn weighted_bernstein_sum_tail(s: f64, epsilon_sum: f64, sigma2: f64, range: f64) -> f64 {
    (-(epsilon_sum * epsilon_sum) / (2.0 * (s * sigma2 + range * epsilon_sum / 3.0))).exp()
}

/// Failure probability `exp(−sε² / (2M⁴))` for the defect of a single
/// M-bounded hypothesis exceeding `−ε`.
pub fn defect_single_bound(s: f64, epsilon: f64, range: f64) -> Result<f64> {
    if !(s > 0.0) || !(range > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::invalid("defect bound needs s > 0, M > 0, ε >= 0"));
    }
    Ok((-(s * epsilon * epsilon) / (2.0 * range.powi(4))).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Expected values from 30-digit mpmath evaluation of each formula.

    fn base() -> BoundInputs {
        BoundInputs::new(100.0, 100.0, 0.1, 0.25, 1.0)
    }

    #[test]
    fn bernstein_examples() {
        assert_relative_eq!(
            base().bernstein_tail().unwrap(),
            0.171237142944788172,
            max_relative = 1e-14
        );
        let tiny = BoundInputs {
            epsilon: 1e-12,
            ..base()
        };
        assert_relative_eq!(tiny.bernstein_tail().unwrap(), 1.0, max_relative = 1e-9);
        let doubled = BoundInputs {
            m: 200.0,
            s: 200.0,
            ..base()
        };
        let b = base().bernstein_tail().unwrap();
        assert_relative_eq!(
            doubled.bernstein_tail().unwrap(),
            b * b,
            max_relative = 1e-14
        );
    }

    #[test]
    fn chromatic_examples() {
        let inputs = base().with_chi_star(2.5);
        assert_relative_eq!(
            inputs.chromatic_tail().unwrap(),
            0.636503917734685543,
            max_relative = 1e-14
        );
        let one = base().with_chi_star(1.0);
        let expected = (-(8.0_f64 * 100.0 * 0.01) / (25.0 * (0.25 + 0.1 / 3.0))).exp();
        assert_relative_eq!(
            one.chromatic_tail().unwrap(),
            expected,
            max_relative = 1e-15
        );
        let huge = base().with_chi_star(1e15);
        assert_relative_eq!(huge.chromatic_tail().unwrap(), 1.0, max_relative = 1e-12);
        assert_eq!(base().chromatic_tail(), Err(Error::ChromaticUnavailable));
    }

    #[test]
    fn weighted_bernstein_examples() {
        assert_eq!(
            base().weighted_bernstein_tail().unwrap().to_bits(),
            base().bernstein_tail().unwrap().to_bits()
        );
        let inputs = BoundInputs { s: 2.5, ..base() };
        assert_relative_eq!(
            inputs.weighted_bernstein_tail().unwrap(),
            0.956841381276779475,
            max_relative = 1e-14
        );
        let tiny = BoundInputs { s: 1e-12, ..base() };
        assert_relative_eq!(
            tiny.weighted_bernstein_tail().unwrap(),
            1.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn bennett_examples() {
        assert_eq!(weighted_bennett_tail(2.5, 0.0, 0.25, 1.0).unwrap(), 1.0);
        assert_relative_eq!(bennett_h(0.4), 0.0710611312696981027, max_relative = 1e-13);
        assert_relative_eq!(
            weighted_bennett_tail(2.5, 0.25, 0.25, 1.0).unwrap(),
            0.956558619041392225,
            max_relative = 1e-14
        );
        assert_eq!(weighted_bennett_tail(2.5, 0.25, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(weighted_bennett_tail(2.5, 0.0, 0.0, 1.0).unwrap(), 1.0);
        assert!(weighted_bennett_tail(0.0, 0.25, 0.25, 1.0).is_err());
        assert!(
            weighted_bennett_tail(2.5, 0.25, 0.25, 1.0).unwrap()
                <= weighted_bernstein_sum_tail(2.5, 0.25, 0.25, 1.0)
        );
    }

    #[test]
    fn sample_error_iid_examples() {
        let unit = BoundInputs::new(300.0, 300.0, 1.0, 0.0, 1.0);
        assert_relative_eq!(
            unit.sample_error_bound_iid().unwrap(),
            0.367879441171442322,
            max_relative = 1e-14
        );
        let half = BoundInputs {
            epsilon: 0.5,
            ..unit
        };
        assert_relative_eq!(
            half.sample_error_bound_iid().unwrap(),
            0.606530659712633424,
            max_relative = 1e-14
        );
        // ℕ(H, 0.025) = ⌈1 + 40⌉² = 1681
        let linear = BoundInputs::new(1000.0, 1000.0, 0.6, 0.0, 2.0)
            .with_covering(CoveringModel::linear(2, 1.0).unwrap());
        assert_relative_eq!(
            linear.sample_error_bound_iid().unwrap(),
            1483.47729324470487,
            max_relative = 1e-13
        );
    }

    #[test]
    fn sample_error_eqw_examples() {
        let inputs = BoundInputs::new(1400.0 / 3.0, 1.0, 1.0, 0.0, 1.0).with_chi_star(1.0);
        assert_relative_eq!(
            inputs.sample_error_bound_eqw().unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-14
        );
        let doubled = inputs.clone().with_chi_star(2.0);
        assert_relative_eq!(
            doubled.log_sample_error_bound_eqw().unwrap(),
            0.5 * inputs.log_sample_error_bound_eqw().unwrap(),
            max_relative = 1e-14
        );
        let c5 = BoundInputs::new(5.0, 2.5, 0.5, 0.0, 1.0).with_chi_star(2.5);
        assert_relative_eq!(
            c5.sample_error_bound_eqw().unwrap(),
            0.997859437136446677,
            max_relative = 1e-14
        );
        assert!(BoundInputs::new(5.0, 2.5, 0.5, 0.0, 1.0)
            .sample_error_bound_eqw()
            .is_err());
    }

    #[test]
    fn sample_error_weighted_examples() {
        let same = BoundInputs::new(300.0, 300.0, 0.7, 0.0, 1.3);
        assert_eq!(
            same.sample_error_bound_weighted().unwrap().to_bits(),
            same.sample_error_bound_iid().unwrap().to_bits()
        );
        let c5 = BoundInputs::new(5.0, 2.5, 0.5, 0.0, 1.0);
        assert_relative_eq!(
            c5.sample_error_bound_weighted().unwrap(),
            0.995842001845109944,
            max_relative = 1e-14
        );
        let more = BoundInputs {
            s: 3.0,
            ..c5.clone()
        };
        assert!(
            more.sample_error_bound_weighted().unwrap() < c5.sample_error_bound_weighted().unwrap()
        );
    }

    #[test]
    fn defect_examples() {
        assert_relative_eq!(
            defect_single_bound(2.0, 1.0, 1.0).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-15
        );
        assert_eq!(defect_single_bound(2.0, 0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            defect_single_bound(2.5, 0.3, 1.0).unwrap(),
            0.893597347108515672,
            max_relative = 1e-14
        );
    }

    #[test]
    fn covering_examples() {
        let one = CoveringModel::linear(1, 1.0).unwrap();
        assert_eq!(covering_number_linear(&one, 1e6).unwrap(), 1.0);
        assert_eq!(covering_number_linear(&one, 0.5).unwrap(), 3.0);
        let two = CoveringModel::linear(2, 1.0).unwrap();
        for tau in [0.5, 0.3, 0.01] {
            let c1 = covering_number_linear(&one, tau).unwrap();
            assert_relative_eq!(
                covering_number_linear(&two, tau).unwrap(),
                c1 * c1,
                max_relative = 1e-12
            );
        }
        assert!(covering_number_linear(&one, 0.0).is_err());
        assert!(covering_number_linear(&CoveringModel::unit(), 0.1).is_err());
    }

    #[test]
    fn one_dimensional_grid_covers() {
        // centres spaced 2τ apart starting at −R cover [−R, R]
        let (r, tau) = (1.0, 0.5);
        let n =
            covering_number_linear(&CoveringModel::linear(1, r).unwrap(), tau).unwrap() as usize;
        let centres: Vec<f64> = (0..n).map(|j| -r + 2.0 * tau * j as f64).collect();
        assert_eq!(centres, vec![-1.0, 0.0, 1.0]);
        for step in 0..=1000 {
            let b = -r + 2.0 * r * step as f64 / 1000.0;
            assert!(centres.iter().any(|c| (b - c).abs() <= tau + 1e-12));
        }
    }

    #[test]
    fn table_covering() {
        let t = CoveringModel::table(vec![(0.01, 100), (0.1, 10), (1.0, 1)]).unwrap();
        assert_eq!(t.count(0.5).unwrap(), 10.0);
        assert_eq!(t.count(2.0).unwrap(), 1.0);
        assert!(t.count(0.001).is_err());
        assert!(CoveringModel::table(vec![(0.1, 1), (0.2, 5)]).is_err());
    }

    #[test]
    fn invalid_inputs() {
        assert!(BoundInputs {
            epsilon: 0.0,
            ..base()
        }
        .bernstein_tail()
        .is_err());
        assert!(BoundInputs {
            range: -1.0,
            ..base()
        }
        .bernstein_tail()
        .is_err());
        assert!(BoundInputs {
            sigma2: 2.0,
            ..base()
        }
        .bernstein_tail()
        .is_err());
        assert!(BoundInputs { s: 101.0, ..base() }.bernstein_tail().is_err());
        assert!(base().with_chi_star(0.5).chromatic_tail().is_err());
    }
}
