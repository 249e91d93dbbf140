use super::KPartiteHypergraph;
use crate::error::{Error, Result};
use crate::lp::LinearProgram;

/// Default size limit for exact independence numbers.
pub const DEFAULT_ALPHA_CAP: usize = 24;
/// Default size limit for exact fractional chromatic numbers.
pub const DEFAULT_CHI_CAP: usize = 16;
/// Exact routines work on 64-bit vertex masks.
pub const MAX_EXACT_CAP: usize = 64;

/// Size limits for the exact (exponential-time) graph invariants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactCaps {
    pub alpha: usize,
    pub chi: usize,
}

impl Default for ExactCaps {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA_CAP,
            chi: DEFAULT_CHI_CAP,
        }
    }
}

impl ExactCaps {
    pub const ALPHA_ENV: &'static str = "NETWEIGHT_ALPHA_CAP";
    pub const CHI_ENV: &'static str = "NETWEIGHT_CHI_CAP";

    /// Defaults, overridden by `NETWEIGHT_ALPHA_CAP` / `NETWEIGHT_CHI_CAP`.
    pub fn from_env() -> Result<Self> {
        let read = |name: &str, default: usize| -> Result<usize> {
            match std::env::var(name) {
                Err(_) => Ok(default),
                Ok(v) => {
                    let cap: usize = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("{name}={v} is not an integer")))?;
                    if cap > MAX_EXACT_CAP {
                        return Err(Error::Config(format!(
                            "{name}={cap} exceeds the hard limit {MAX_EXACT_CAP}"
                        )));
                    }
                    Ok(cap)
                }
            }
        };
        Ok(Self {
            alpha: read(Self::ALPHA_ENV, DEFAULT_ALPHA_CAP)?,
            chi: read(Self::CHI_ENV, DEFAULT_CHI_CAP)?,
        })
    }
}

/// Overlap graph `Γ`: one vertex per hyperedge, adjacent when the
/// hyperedges share a vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    neighbors: Vec<Vec<usize>>,
}

impl DependencyGraph {
    pub fn build(g: &KPartiteHypergraph) -> Self {
        let mut neighbors = vec![Vec::new(); g.m()];
        for partition in g.incidence() {
            for eta in partition {
                for (x, &a) in eta.iter().enumerate() {
                    for &b in &eta[x + 1..] {
                        neighbors[a].push(b);
                        neighbors[b].push(a);
                    }
                }
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }
        Self { neighbors }
    }

    /// Graph on `m` vertices with the given undirected edges. Self-loops are
    /// dropped.
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); m];
        for &(a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::invalid(format!("edge ({a},{b}) outside 0..{m}")));
            }
            if a != b {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }
        Ok(Self { neighbors })
    }

    pub fn m(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.neighbors[a]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.neighbors[a].len()
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }

    fn masks(&self) -> Vec<u64> {
        self.neighbors
            .iter()
            .map(|n| n.iter().fold(0u64, |acc, &b| acc | 1 << b))
            .collect()
    }
}

fn check_cap(what: &'static str, m: usize, cap: usize) -> Result<()> {
    if m > cap.min(MAX_EXACT_CAP) {
        return Err(Error::InstanceTooLarge {
            what,
            size: m,
            cap: cap.min(MAX_EXACT_CAP),
        });
    }
    Ok(())
}

fn full_mask(m: usize) -> u64 {
    if m == 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

fn members(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| mask >> i & 1 == 1).collect()
}

/// `α(Γ)` with the default cap.
pub fn independence_number(gamma: &DependencyGraph) -> Result<usize> {
    independence_number_with_cap(gamma, DEFAULT_ALPHA_CAP)
}

pub fn independence_number_with_cap(gamma: &DependencyGraph, cap: usize) -> Result<usize> {
    Ok(maximum_independent_set(gamma, cap)?.len())
}

/// A maximum independent set, as sorted vertex indices.
///
/// Branch and bound on bit masks: a vertex with no remaining neighbours is
/// always taken; otherwise branch on the lowest remaining vertex.
pub fn maximum_independent_set(gamma: &DependencyGraph, cap: usize) -> Result<Vec<usize>> {
    check_cap("independence number", gamma.m(), cap)?;
    let adj = gamma.masks();
    let mut best = 0u64;
    branch(&adj, full_mask(gamma.m()), 0, &mut best);
    Ok(members(best))
}

fn branch(adj: &[u64], candidates: u64, chosen: u64, best: &mut u64) {
    if candidates == 0 {
        if chosen.count_ones() > best.count_ones() {
            *best = chosen;
        }
        return;
    }
    if chosen.count_ones() + candidates.count_ones() <= best.count_ones() {
        return;
    }
    let v = candidates.trailing_zeros() as usize;
    let bit = 1u64 << v;
    let blocked = adj[v] & candidates;
    branch(adj, candidates & !bit & !blocked, chosen | bit, best);
    if blocked != 0 {
        branch(adj, candidates & !bit, chosen, best);
    }
}

/// All maximal independent sets of `Γ` as bit masks, in the deterministic
/// order produced by Bron–Kerbosch with pivoting on the complement graph.
pub fn maximal_independent_sets(gamma: &DependencyGraph, cap: usize) -> Result<Vec<u64>> {
    check_cap("maximal independent sets", gamma.m(), cap)?;
    let m = gamma.m();
    if m == 0 {
        return Ok(Vec::new());
    }
    let full = full_mask(m);
    let comp: Vec<u64> = gamma
        .masks()
        .iter()
        .enumerate()
        .map(|(v, &a)| !a & full & !(1u64 << v))
        .collect();
    let mut out = Vec::new();
    bron_kerbosch(&comp, 0, full, 0, &mut out);
    Ok(out)
}

fn bron_kerbosch(comp: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = members(p | x)
        .into_iter()
        .max_by_key(|&u| ((comp[u] & p).count_ones(), std::cmp::Reverse(u)))
        .expect("p is non-empty");
    for v in members(p & !comp[pivot]) {
        let bit = 1u64 << v;
        bron_kerbosch(comp, r | bit, p & comp[v], x & comp[v], out);
        p &= !bit;
        x |= bit;
    }
}

/// Optimal fractional colouring: weights on maximal independent sets.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalColoring {
    pub value: f64,
    /// `(members, weight)` for every class with positive weight.
    pub classes: Vec<(Vec<usize>, f64)>,
}

/// `χ*(Γ)` with the default cap.
pub fn fractional_chromatic_number(gamma: &DependencyGraph) -> Result<FractionalColoring> {
    fractional_chromatic_number_with_cap(gamma, DEFAULT_CHI_CAP)
}

/// `χ*(Γ) = min Σ_I x_I` subject to `Σ_{I ∋ v} x_I >= 1`, over maximal
/// independent sets `I`.
///
/// The simplex runs on the packing dual `max Σ y_v, Σ_{v ∈ I} y_v <= 1`;
/// the colouring weights are read off as its row duals.
pub fn fractional_chromatic_number_with_cap(
    gamma: &DependencyGraph,
    cap: usize,
) -> Result<FractionalColoring> {
    let sets = maximal_independent_sets(gamma, cap)?;
    let m = gamma.m();
    let mut lp = LinearProgram::new(vec![1.0; m]);
    for &set in &sets {
        lp.add_indicator_constraint(&members(set), 1.0)?;
    }
    let sol = lp.solve()?;
    let classes = sets
        .iter()
        .zip(&sol.dual)
        .filter(|(_, &x)| x > 0.0)
        .map(|(&set, &x)| (members(set), x))
        .collect();
    Ok(FractionalColoring {
        value: sol.objective,
        classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::families;
    use approx::assert_abs_diff_eq;

    fn cycle_graph(m: usize) -> DependencyGraph {
        let edges: Vec<_> = (0..m).map(|i| (i, (i + 1) % m)).collect();
        DependencyGraph::from_edges(m, &edges).unwrap()
    }

    fn complete(m: usize) -> DependencyGraph {
        let edges: Vec<_> = (0..m)
            .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
            .collect();
        DependencyGraph::from_edges(m, &edges).unwrap()
    }

    #[test]
    fn disjoint_edges_give_empty_graph() {
        let gamma = DependencyGraph::build(&families::disjoint(3, 2).unwrap());
        assert_eq!(gamma.edge_count(), 0);
    }

    #[test]
    fn common_vertex_gives_clique() {
        let gamma = DependencyGraph::build(&families::star(4, 2).unwrap());
        assert_eq!(gamma, complete(4));
    }

    #[test]
    fn duplicate_edges_are_adjacent() {
        let g = KPartiteHypergraph::new(vec![2, 2], vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert!(DependencyGraph::build(&g).is_adjacent(0, 1));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(
            independence_number(&DependencyGraph::from_edges(5, &[]).unwrap()).unwrap(),
            5
        );
        assert_eq!(independence_number(&complete(4)).unwrap(), 1);
        assert_eq!(independence_number(&cycle_graph(5)).unwrap(), 2);
        assert_eq!(independence_number(&cycle_graph(6)).unwrap(), 3);
        assert_eq!(
            independence_number(&DependencyGraph::from_edges(0, &[]).unwrap()).unwrap(),
            0
        );
    }

    #[test]
    fn chi_examples() {
        let empty = DependencyGraph::from_edges(6, &[]).unwrap();
        assert_abs_diff_eq!(
            fractional_chromatic_number(&empty).unwrap().value,
            1.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            fractional_chromatic_number(&complete(5)).unwrap().value,
            5.0,
            epsilon = 1e-9
        );
        let c5 = fractional_chromatic_number(&cycle_graph(5)).unwrap();
        assert_abs_diff_eq!(c5.value, 2.5, epsilon = 1e-9);
        // colouring certificate covers every vertex at least once
        for v in 0..5 {
            let cover: f64 = c5
                .classes
                .iter()
                .filter(|(s, _)| s.contains(&v))
                .map(|(_, x)| x)
                .sum();
            assert!(cover >= 1.0 - 1e-9);
        }
        let total: f64 = c5.classes.iter().map(|(_, x)| x).sum();
        assert_abs_diff_eq!(total, 2.5, epsilon = 1e-9);
    }

    #[test]
    fn maximal_sets_of_c5() {
        let sets = maximal_independent_sets(&cycle_graph(5), 16).unwrap();
        let mut sets: Vec<_> = sets.into_iter().map(members).collect();
        sets.sort();
        assert_eq!(
            sets,
            vec![vec![0, 2], vec![0, 3], vec![1, 3], vec![1, 4], vec![2, 4]]
        );
    }

    #[test]
    fn caps_are_enforced() {
        let big = DependencyGraph::from_edges(25, &[]).unwrap();
        assert!(matches!(
            independence_number(&big),
            Err(Error::InstanceTooLarge {
                size: 25,
                cap: 24,
                ..
            })
        ));
        assert!(
            fractional_chromatic_number(&DependencyGraph::from_edges(17, &[]).unwrap()).is_err()
        );
        assert_eq!(independence_number_with_cap(&big, 30).unwrap(), 25);
        let huge = DependencyGraph::from_edges(65, &[]).unwrap();
        assert!(independence_number_with_cap(&huge, 100).is_err());
    }
}
