//! Per-example weighting schemes.
//!
//! * EQW: every example gets weight 1 (treat the sample as i.i.d.).
//! * IND: a hypergraph matching; kept examples get weight 1, the rest 0.
//! * OPT: a maximum fractional matching. The weights solve
//!   `max Σ w_i` subject to `w >= 0` and `Σ_{i ∈ η(v)} w_i <= 1` for every
//!   vertex `v`; the optimum is the s-value `s(G)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{
    check_permutation, maximum_independent_set, DependencyGraph, KPartiteHypergraph, Vertex,
    DEFAULT_ALPHA_CAP,
};
use crate::lp::LinearProgram;

/// Absolute tolerance for feasibility and optimality checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Eqw,
    Ind,
    Opt,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Eqw => "eqw",
            Method::Ind => "ind",
            Method::Opt => "opt",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eqw" => Ok(Method::Eqw),
            "ind" => Ok(Method::Ind),
            "opt" => Ok(Method::Opt),
            other => Err(Error::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Weights for the `m` examples together with the normaliser used to
/// average them (`m` for EQW, the matching size for IND, `s` for OPT).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weighting {
    pub method: Method,
    pub weights: Vec<f64>,
    pub normalizer: f64,
}

impl Weighting {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same weights and normaliser scaled by `c > 0`.
    pub fn scaled(&self, c: f64) -> Weighting {
        Weighting {
            method: self.method,
            weights: self.weights.iter().map(|w| w * c).collect(),
            normalizer: self.normalizer * c,
        }
    }
}

fn require_edges(g: &KPartiteHypergraph) -> Result<()> {
    if g.m() == 0 {
        Err(Error::EmptyEdgeSet)
    } else {
        Ok(())
    }
}

pub fn eqw_weights(g: &KPartiteHypergraph) -> Result<Weighting> {
    require_edges(g)?;
    Ok(Weighting {
        method: Method::Eqw,
        weights: vec![1.0; g.m()],
        normalizer: g.m() as f64,
    })
}

/// Greedy maximal matching: scan edges in `order` (identity when `None`)
/// and keep every edge that overlaps none of the edges kept so far.
pub fn greedy_matching_weights(
    g: &KPartiteHypergraph,
    order: Option<&[usize]>,
) -> Result<Weighting> {
    require_edges(g)?;
    let identity: Vec<usize>;
    let order = match order {
        Some(o) => {
            check_permutation(o, g.m())?;
            o
        }
        None => {
            identity = (0..g.m()).collect();
            &identity
        }
    };
    let mut used: Vec<Vec<bool>> = g
        .partition_sizes()
        .iter()
        .map(|&n| vec![false; n])
        .collect();
    let mut weights = vec![0.0; g.m()];
    for &e in order {
        let edge = g.edge(e);
        if edge.iter().enumerate().all(|(i, &v)| !used[i][v]) {
            for (i, &v) in edge.iter().enumerate() {
                used[i][v] = true;
            }
            weights[e] = 1.0;
        }
    }
    let size = weights.iter().sum();
    Ok(Weighting {
        method: Method::Ind,
        weights,
        normalizer: size,
    })
}

/// Maximum matching through an exact maximum independent set of `Γ`.
pub fn exact_matching_weights(g: &KPartiteHypergraph, cap: usize) -> Result<Weighting> {
    require_edges(g)?;
    let set = maximum_independent_set(&DependencyGraph::build(g), cap)?;
    let mut weights = vec![0.0; g.m()];
    for &e in &set {
        weights[e] = 1.0;
    }
    Ok(Weighting {
        method: Method::Ind,
        weights,
        normalizer: set.len() as f64,
    })
}

/// Exact matching when `m <= cap`, greedy (identity order) above it.
pub fn matching_weights(g: &KPartiteHypergraph, cap: usize) -> Result<Weighting> {
    if g.m() <= cap {
        exact_matching_weights(g, cap)
    } else {
        greedy_matching_weights(g, None)
    }
}

/// Optimal weighting plus its LP certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalWeighting {
    pub weighting: Weighting,
    /// Fractional vertex cover `y`, indexed `[partition][vertex]`; zero on
    /// isolated vertices. `Σ y = s` at optimality.
    pub vertex_cover: Vec<Vec<f64>>,
    pub pivots: usize,
}

impl OptimalWeighting {
    pub fn s_value(&self) -> f64 {
        self.weighting.normalizer
    }

    /// Largest violation of the dual constraints `Σ_{v ∈ e} y_v >= 1`.
    pub fn cover_violation(&self, g: &KPartiteHypergraph) -> f64 {
        g.edges()
            .map(|edge| {
                let load: f64 = edge
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| self.vertex_cover[i][v])
                    .sum();
                (1.0 - load).max(0.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn cover_total(&self) -> f64 {
        self.vertex_cover.iter().flatten().sum()
    }
}

pub fn optimal_weighting(g: &KPartiteHypergraph) -> Result<Weighting> {
    Ok(optimal_weighting_with_certificate(g)?.weighting)
}

/// Solves the s-value LP with the Bland-rule simplex. Rows are the vertices
/// of degree at least one, partition-major.
pub fn optimal_weighting_with_certificate(g: &KPartiteHypergraph) -> Result<OptimalWeighting> {
    require_edges(g)?;
    let mut lp = LinearProgram::new(vec![1.0; g.m()]);
    let mut rows: Vec<Vertex> = Vec::new();
    for (partition, vertices) in g.incidence().into_iter().enumerate() {
        for (index, eta) in vertices.into_iter().enumerate() {
            if !eta.is_empty() {
                lp.add_indicator_constraint(&eta, 1.0)?;
                rows.push(Vertex { partition, index });
            }
        }
    }
    let sol = lp.solve()?;
    let mut vertex_cover: Vec<Vec<f64>> =
        g.partition_sizes().iter().map(|&n| vec![0.0; n]).collect();
    for (v, y) in rows.iter().zip(&sol.dual) {
        vertex_cover[v.partition][v.index] = *y;
    }
    let normalizer = sol.primal.iter().sum();
    Ok(OptimalWeighting {
        weighting: Weighting {
            method: Method::Opt,
            weights: sol.primal,
            normalizer,
        },
        vertex_cover,
        pivots: sol.pivots,
    })
}

/// `s(G)`, the optimum of the s-value LP.
pub fn s_value(g: &KPartiteHypergraph) -> Result<f64> {
    Ok(optimal_weighting(g)?.normalizer)
}

/// Outcome of [`verify_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible,
    NegativeWeight { edge: usize, weight: f64 },
    VertexOverloaded { vertex: Vertex, load: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

impl std::fmt::Display for Feasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Feasibility::Feasible => f.write_str("feasible"),
            Feasibility::NegativeWeight { edge, weight } => {
                write!(f, "edge {edge} has negative weight {weight}")
            }
            Feasibility::VertexOverloaded { vertex, load } => {
                write!(f, "vertex {vertex} carries total weight {load} > 1")
            }
        }
    }
}

/// Checks `w >= 0` and `Σ_{i ∈ η(v)} w_i <= 1` for all `v`, within
/// [`FEASIBILITY_TOL`]. Reports the first violation in edge order, then in
/// partition-major vertex order.
pub fn verify_feasible(g: &KPartiteHypergraph, w: &[f64]) -> Result<Feasibility> {
    if w.len() != g.m() {
        return Err(Error::DimensionMismatch {
            expected: g.m(),
            found: w.len(),
        });
    }
    if let Some((edge, &weight)) = w
        .iter()
        .enumerate()
        .find(|(_, &x)| !(x >= -FEASIBILITY_TOL))
    {
        return Ok(Feasibility::NegativeWeight { edge, weight });
    }
    let mut load: Vec<Vec<f64>> = g.partition_sizes().iter().map(|&n| vec![0.0; n]).collect();
    for (edge, &x) in g.edges().zip(w) {
        for (i, &v) in edge.iter().enumerate() {
            load[i][v] += x;
        }
    }
    for (partition, loads) in load.iter().enumerate() {
        for (index, &l) in loads.iter().enumerate() {
            if l > 1.0 + FEASIBILITY_TOL {
                return Ok(Feasibility::VertexOverloaded {
                    vertex: Vertex { partition, index },
                    load: l,
                });
            }
        }
    }
    Ok(Feasibility::Feasible)
}

/// Default-cap IND weights used by reports and experiments.
pub fn ind_weights(g: &KPartiteHypergraph) -> Result<Weighting> {
    matching_weights(g, DEFAULT_ALPHA_CAP)
}
