use serde::{Deserialize, Serialize};

use super::model::GenerativeModel;
use crate::error::{Error, Result};
use crate::hypergraph::{KPartiteHypergraph, Vertex};
use crate::rng::{Slot, StreamFactory};

/// One labelled example `z = (x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub x: Vec<f64>,
    pub y: f64,
}

/// A `G`-networked sample: one feature per vertex and one example per
/// hyperedge, whose feature blocks are copies of its vertices' features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkedSample {
    /// `[partition][vertex]` feature vectors.
    pub vertex_features: Vec<Vec<Vec<f64>>>,
    /// `[partition][vertex]` atom indices; `None` for continuous partitions.
    pub vertex_atoms: Vec<Option<Vec<usize>>>,
    pub examples: Vec<Example>,
    pub seed: u64,
    pub trial: u64,
}

impl NetworkedSample {
    pub fn m(&self) -> usize {
        self.examples.len()
    }

    pub fn feature_of(&self, v: Vertex) -> &[f64] {
        &self.vertex_features[v.partition][v.index]
    }

    /// Column range of partition `i`'s block inside a composed vector.
    pub fn block_range(&self, partition: usize) -> std::ops::Range<usize> {
        let dim = |p: usize| self.vertex_features[p].first().map_or(0, Vec::len);
        let start: usize = (0..partition).map(dim).sum();
        start..start + dim(partition)
    }
}

fn check_model(g: &KPartiteHypergraph, model: &GenerativeModel) -> Result<()> {
    model.validate()?;
    if model.k() != g.k() {
        return Err(Error::DimensionMismatch {
            expected: g.k(),
            found: model.k(),
        });
    }
    Ok(())
}

/// Draws one networked sample (trial 0 of `seed`).
pub fn sample_networked(
    g: &KPartiteHypergraph,
    model: &GenerativeModel,
    seed: u64,
) -> Result<NetworkedSample> {
    check_model(g, model)?;
    Ok(draw_trial(g, model, &StreamFactory::new(seed), seed, 0))
}

/// Draws the sample of trial `trial`. Each vertex and each edge label reads
/// its own stream slot, so the result does not depend on evaluation order.
pub fn sample_networked_trial(
    g: &KPartiteHypergraph,
    model: &GenerativeModel,
    seed: u64,
    trial: u64,
) -> Result<NetworkedSample> {
    check_model(g, model)?;
    Ok(draw_trial(g, model, &StreamFactory::new(seed), seed, trial))
}

pub(crate) fn draw_trial(
    g: &KPartiteHypergraph,
    model: &GenerativeModel,
    streams: &StreamFactory,
    seed: u64,
    trial: u64,
) -> NetworkedSample {
    let mut vertex_features = Vec::with_capacity(g.k());
    let mut vertex_atoms = Vec::with_capacity(g.k());
    let mut flat = 0;
    for (dist, &n) in model.features.iter().zip(g.partition_sizes()) {
        let mut feats = Vec::with_capacity(n);
        let mut atoms = dist.atom_count().map(|_| Vec::with_capacity(n));
        for _ in 0..n {
            let mut rng = streams.trial(trial, Slot::Vertex(flat));
            let (x, atom) = dist.sample(&mut rng);
            feats.push(x);
            if let (Some(list), Some(a)) = (atoms.as_mut(), atom) {
                list.push(a);
            }
            flat += 1;
        }
        vertex_features.push(feats);
        vertex_atoms.push(atoms);
    }

    let all_discrete = vertex_atoms.iter().all(Option::is_some);
    let examples = g
        .edges()
        .enumerate()
        .map(|(e, edge)| {
            let mut x = Vec::with_capacity(model.dim());
            for (i, &v) in edge.iter().enumerate() {
                x.extend_from_slice(&vertex_features[i][v]);
            }
            let atoms: Option<Vec<usize>> = all_discrete.then(|| {
                edge.iter()
                    .enumerate()
                    .map(|(i, &v)| vertex_atoms[i].as_ref().unwrap()[v])
                    .collect()
            });
            let mut rng = streams.trial(trial, Slot::Label(e));
            let y = model.sample_label(&x, atoms.as_deref(), &mut rng);
            Example { x, y }
        })
        .collect();

    NetworkedSample {
        vertex_features,
        vertex_atoms,
        examples,
        seed,
        trial,
    }
}

/// Draws `n` fresh i.i.d. examples: every draw gets its own features in
/// every partition, so nothing is shared.
pub fn sample_iid(model: &GenerativeModel, n: usize, seed: u64) -> Result<Vec<Example>> {
    model.validate()?;
    let streams = StreamFactory::new(seed);
    Ok((0..n as u64)
        .map(|draw| {
            let mut rng = streams.test_stream(draw);
            let mut x = Vec::with_capacity(model.dim());
            let mut atoms = Vec::with_capacity(model.k());
            for dist in &model.features {
                let (f, a) = dist.sample(&mut rng);
                x.extend_from_slice(&f);
                atoms.extend(a);
            }
            let atoms = (atoms.len() == model.k()).then_some(atoms);
            let y = model.sample_label(&x, atoms.as_deref(), &mut rng);
            Example { x, y }
        })
        .collect())
}
