//! Generators for the standard instance families.

use rand::Rng;

use super::KPartiteHypergraph;
use crate::error::{Error, Result};
use crate::rng::StreamFactory;

/// `m` pairwise disjoint edges: edge `i` uses vertex `i` of every partition.
pub fn disjoint(m: usize, k: usize) -> Result<KPartiteHypergraph> {
    check_k(k)?;
    check_m(m)?;
    KPartiteHypergraph::new(vec![m; k], (0..m).map(|i| vec![i; k]).collect())
}

/// `m` edges through a single vertex of partition 0, private elsewhere.
pub fn star(m: usize, k: usize) -> Result<KPartiteHypergraph> {
    check_k(k)?;
    check_m(m)?;
    let mut sizes = vec![m; k];
    sizes[0] = 1;
    let edges = (0..m)
        .map(|i| {
            let mut e = vec![i; k];
            e[0] = 0;
            e
        })
        .collect();
    KPartiteHypergraph::new(sizes, edges)
}

/// `m` edges whose dependency graph is the cycle `C_m`.
///
/// Consecutive edges `j` and `j+1 (mod m)` share a fresh vertex in partition
/// `j mod 2`; the closing pair of an odd cycle shares one in partition 2.
/// Unshared components get private vertices. Odd cycles need `k >= 3`,
/// even cycles `k >= 2`.
pub fn cycle(m: usize, k: usize) -> Result<KPartiteHypergraph> {
    if m < 3 {
        return Err(Error::invalid("a cycle needs at least 3 edges"));
    }
    let needed = if m % 2 == 1 { 3 } else { 2 };
    if k < needed {
        return Err(Error::invalid(format!(
            "a cycle of length {m} needs k >= {needed}"
        )));
    }
    let mut edges: Vec<Vec<Option<usize>>> = vec![vec![None; k]; m];
    let mut sizes = vec![0usize; k];
    for j in 0..m {
        let partition = if j == m - 1 && m % 2 == 1 { 2 } else { j % 2 };
        let v = sizes[partition];
        sizes[partition] += 1;
        edges[j][partition] = Some(v);
        edges[(j + 1) % m][partition] = Some(v);
    }
    let edges = edges
        .into_iter()
        .map(|edge| {
            edge.into_iter()
                .enumerate()
                .map(|(i, c)| {
                    c.unwrap_or_else(|| {
                        sizes[i] += 1;
                        sizes[i] - 1
                    })
                })
                .collect()
        })
        .collect();
    KPartiteHypergraph::new(sizes, edges)
}

/// `m` edges with components drawn uniformly from each partition. Smaller
/// partitions give denser overlap.
pub fn random(k: usize, m: usize, sizes: &[usize], seed: u64) -> Result<KPartiteHypergraph> {
    check_k(k)?;
    if sizes.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: sizes.len(),
        });
    }
    let mut rng = StreamFactory::new(seed).generator_stream();
    let edges = (0..m)
        .map(|_| {
            sizes
                .iter()
                .map(|&n| rng.random_range(0..n.max(1)))
                .collect()
        })
        .collect();
    KPartiteHypergraph::new(sizes.to_vec(), edges)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    Ok(())
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    Ok(())
}
