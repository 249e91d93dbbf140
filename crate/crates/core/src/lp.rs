//! Dense primal simplex for packing-type linear programs.
//!
//! Solves `max c·x  s.t.  A x <= b, x >= 0` with `b >= 0`, so the slack
//! basis at the origin is feasible and no phase one is needed. Pivoting
//! follows Bland's rule (lowest-index entering column, lowest-index leaving
//! basic variable among ratio ties), which rules out cycling and makes the
//! pivot sequence a pure function of the input.

use crate::error::{Error, Result};

/// Threshold below which a tableau entry counts as zero.
const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    bounds: Vec<f64>,
}

/// Optimal primal/dual pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub primal: Vec<f64>,
    /// One multiplier per constraint row.
    pub dual: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            ..Self::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Adds `coeffs · x <= bound`.
    pub fn add_constraint(&mut self, coeffs: Vec<f64>, bound: f64) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                found: coeffs.len(),
            });
        }
        if !(bound >= 0.0) {
            return Err(Error::invalid(
                "constraint bounds must be non-negative so the origin is feasible",
            ));
        }
        self.rows.push(coeffs);
        self.bounds.push(bound);
        Ok(())
    }

    /// Adds `Σ_{j ∈ support} x_j <= bound`.
    pub fn add_indicator_constraint(&mut self, support: &[usize], bound: f64) -> Result<()> {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &j in support {
            coeffs[j] += 1.0;
        }
        self.add_constraint(coeffs, bound)
    }

    pub fn solve(&self) -> Result<LpSolution> {
        Tableau::new(self).run()
    }
}

struct Tableau {
    rows: usize,
    vars: usize,
    // rows x (vars + rows) coefficient block, row-major
    coef: Vec<f64>,
    rhs: Vec<f64>,
    // reduced costs for maximization: z = value + Σ reduced_j x_j
    reduced: Vec<f64>,
    value: f64,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let rows = lp.rows.len();
        let vars = lp.objective.len();
        let width = vars + rows;
        let mut coef = vec![0.0; rows * width];
        for (i, row) in lp.rows.iter().enumerate() {
            coef[i * width..i * width + vars].copy_from_slice(row);
            coef[i * width + vars + i] = 1.0;
        }
        let mut reduced = vec![0.0; width];
        reduced[..vars].copy_from_slice(&lp.objective);
        Self {
            rows,
            vars,
            coef,
            rhs: lp.bounds.clone(),
            reduced,
            value: 0.0,
            basis: (vars..vars + rows).collect(),
        }
    }

    fn width(&self) -> usize {
        self.vars + self.rows
    }

    fn at(&self, row: usize, col: usize) -> f64 {
        self.coef[row * self.width() + col]
    }

    fn entering(&self) -> Option<usize> {
        self.reduced.iter().position(|&d| d > PIVOT_EPS)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, col);
            if a <= PIVOT_EPS {
                continue;
            }
            let ratio = self.rhs[r] / a;
            best = match best {
                None => Some((r, ratio)),
                Some((b, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1.0);
                    if (tie && self.basis[r] < self.basis[b]) || (!tie && ratio < br) {
                        Some((r, ratio))
                    } else {
                        Some((b, br))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.at(row, col);
        for x in &mut self.coef[row * w..(row + 1) * w] {
            *x /= p;
        }
        self.rhs[row] /= p;
        let pivot_row = self.coef[row * w..(row + 1) * w].to_vec();
        let pivot_rhs = self.rhs[row];
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let f = self.coef[r * w + col];
            if f == 0.0 {
                continue;
            }
            for (x, &pr) in self.coef[r * w..(r + 1) * w].iter_mut().zip(&pivot_row) {
                *x -= f * pr;
            }
            self.coef[r * w + col] = 0.0;
            self.rhs[r] -= f * pivot_rhs;
            if self.rhs[r] < 0.0 && self.rhs[r] > -PIVOT_EPS {
                self.rhs[r] = 0.0;
            }
        }
        let f = self.reduced[col];
        for (d, &pr) in self.reduced.iter_mut().zip(&pivot_row) {
            *d -= f * pr;
        }
        self.reduced[col] = 0.0;
        self.value += f * pivot_rhs;
        self.basis[row] = col;
    }

    fn run(mut self) -> Result<LpSolution> {
        let mut pivots = 0;
        while let Some(col) = self.entering() {
            let row = self.leaving(col).ok_or(Error::Unbounded)?;
            self.pivot(row, col);
            pivots += 1;
        }
        let mut primal = vec![0.0; self.vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.vars {
                primal[b] = self.rhs[r].max(0.0);
            }
        }
        let dual = (0..self.rows)
            .map(|i| (-self.reduced[self.vars + i]).max(0.0))
            .collect();
        Ok(LpSolution {
            primal,
            dual,
            objective: self.value,
            pivots,
        })
    }
}
