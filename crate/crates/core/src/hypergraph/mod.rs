//! k-partite hypergraphs and their dependency graphs.
//!
//! A [`KPartiteHypergraph`] holds `k` vertex partitions and `m` hyperedges.
//! Every hyperedge picks exactly one vertex from each partition, and each
//! hyperedge induces one training example. Two hyperedges overlap when they
//! share a vertex in some partition; the [`DependencyGraph`] records those
//! overlaps.

mod dependency;
pub mod families;
mod parse;

pub use dependency::{
    fractional_chromatic_number, fractional_chromatic_number_with_cap, independence_number,
    independence_number_with_cap, maximal_independent_sets, maximum_independent_set,
    DependencyGraph, ExactCaps, FractionalColoring, DEFAULT_ALPHA_CAP, DEFAULT_CHI_CAP,
    MAX_EXACT_CAP,
};
pub use parse::parse_hypergraph;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex identified by its partition and its index inside the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub partition: usize,
    pub index: usize,
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v({},{})", self.partition, self.index)
    }
}

/// The network `G`: `k` partitions with `n_i` vertices each and an ordered
/// list of hyperedges. Edge component `i` indexes into partition `i`.
///
/// Duplicate edges are allowed; they are distinct examples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "HypergraphFile", into = "HypergraphFile")]
pub struct KPartiteHypergraph {
    partition_sizes: Vec<usize>,
    // row-major, m * k
    components: Vec<usize>,
}

/// Serialized layout shared by the JSON file format.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct HypergraphFile {
    k: usize,
    partition_sizes: Vec<usize>,
    edges: Vec<Vec<usize>>,
}

impl TryFrom<HypergraphFile> for KPartiteHypergraph {
    type Error = Error;

    fn try_from(file: HypergraphFile) -> Result<Self> {
        if file.k != file.partition_sizes.len() {
            return Err(Error::InvalidHypergraph(format!(
                "k = {} but {} partition sizes given",
                file.k,
                file.partition_sizes.len()
            )));
        }
        KPartiteHypergraph::new(file.partition_sizes, file.edges)
    }
}

impl From<KPartiteHypergraph> for HypergraphFile {
    fn from(g: KPartiteHypergraph) -> Self {
        HypergraphFile {
            k: g.k(),
            edges: g.edges().map(<[usize]>::to_vec).collect(),
            partition_sizes: g.partition_sizes,
        }
    }
}

impl KPartiteHypergraph {
    /// Builds and validates a hypergraph.
    pub fn new(partition_sizes: Vec<usize>, edges: Vec<Vec<usize>>) -> Result<Self> {
        let k = partition_sizes.len();
        if k == 0 {
            return Err(Error::InvalidHypergraph("k must be at least 1".into()));
        }
        if let Some(i) = partition_sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidHypergraph(format!(
                "partition {i} has no vertices"
            )));
        }
        let mut components = Vec::with_capacity(edges.len() * k);
        for (e, edge) in edges.iter().enumerate() {
            if edge.len() != k {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {e} has {} components, expected {k}",
                    edge.len()
                )));
            }
            for (i, (&v, &n)) in edge.iter().zip(&partition_sizes).enumerate() {
                if v >= n {
                    return Err(Error::InvalidHypergraph(format!(
                        "edge {e}: component {i} is {v}, outside [0, {n})"
                    )));
                }
            }
            components.extend_from_slice(edge);
        }
        Ok(Self {
            partition_sizes,
            components,
        })
    }

    pub fn k(&self) -> usize {
        self.partition_sizes.len()
    }

    /// Number of hyperedges (examples).
    pub fn m(&self) -> usize {
        self.components.len() / self.k()
    }

    pub fn partition_sizes(&self) -> &[usize] {
        &self.partition_sizes
    }

    pub fn vertex_count(&self) -> usize {
        self.partition_sizes.iter().sum()
    }

    pub fn edge(&self, e: usize) -> &[usize] {
        let k = self.k();
        &self.components[e * k..(e + 1) * k]
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.components.chunks_exact(self.k())
    }

    pub fn overlaps(&self, a: usize, b: usize) -> bool {
        self.edge(a).iter().zip(self.edge(b)).any(|(x, y)| x == y)
    }

    /// Offset of partition `i` in a flat numbering of all vertices.
    pub fn partition_offset(&self, partition: usize) -> usize {
        self.partition_sizes[..partition].iter().sum()
    }

    /// Flat index of a vertex, partition-major.
    pub fn vertex_id(&self, v: Vertex) -> usize {
        self.partition_offset(v.partition) + v.index
    }

    /// `η(v)` for every vertex, indexed `[partition][vertex]`.
    pub fn incidence(&self) -> Vec<Vec<Vec<usize>>> {
        let mut eta: Vec<Vec<Vec<usize>>> = self
            .partition_sizes
            .iter()
            .map(|&n| vec![Vec::new(); n])
            .collect();
        for (e, edge) in self.edges().enumerate() {
            for (i, &v) in edge.iter().enumerate() {
                eta[i][v].push(e);
            }
        }
        eta
    }

    pub fn degrees(&self) -> Vec<Vec<usize>> {
        let mut deg: Vec<Vec<usize>> = self.partition_sizes.iter().map(|&n| vec![0; n]).collect();
        for edge in self.edges() {
            for (i, &v) in edge.iter().enumerate() {
                deg[i][v] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees()
            .iter()
            .flat_map(|d| d.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Per partition, the number of vertices with degree at least one.
    pub fn active_vertex_counts(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .map(|d| d.iter().filter(|&&x| x > 0).count())
            .collect()
    }

    /// Pairs `(a, b)`, `a < b`, of edges that coincide in every component.
    pub fn duplicate_edges(&self) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.m()).collect();
        order.sort_by(|&a, &b| self.edge(a).cmp(self.edge(b)).then(a.cmp(&b)));
        let mut pairs = Vec::new();
        let mut start = 0;
        while start < order.len() {
            let mut end = start + 1;
            while end < order.len() && self.edge(order[end]) == self.edge(order[start]) {
                end += 1;
            }
            for x in start..end {
                for y in x + 1..end {
                    pairs.push((order[x].min(order[y]), order[x].max(order[y])));
                }
            }
            start = end;
        }
        pairs.sort_unstable();
        pairs
    }

    /// Reorders edges: edge `j` of the result is edge `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.m())?;
        let edges = perm.iter().map(|&e| self.edge(e).to_vec()).collect();
        Self::new(self.partition_sizes.clone(), edges)
    }

    /// Renders the plain-text file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.k(), self.m());
        out.push_str(&join(&self.partition_sizes));
        out.push('\n');
        for edge in self.edges() {
            out.push_str(&join(edge));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }
}

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    if perm.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; m];
    for &p in perm {
        if p >= m || std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid(format!(
                "order is not a permutation of 0..{m}"
            )));
        }
    }
    Ok(())
}
