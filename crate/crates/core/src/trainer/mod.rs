//! Initialization and the stochastic training loop.

mod adam;

pub use adam::{adam_step, AdamConfig, AdamState};

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{DancarEmbedding, MIN_RADIUS};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, NegativeSampler, NodeId};
use crate::loss::{evaluate_batch, Gradients, LossBatch, LossBreakdown};
use crate::params::Hyperparams;

/// Radius every disk starts with.
pub const INITIAL_RADIUS: f64 = 0.1;

/// Centers uniform on `[-1, 1]^dim`, radii `0.1`, anchors on their centers.
pub fn init_embedding(g: &DirectedGraph, dim: usize, seed: u64) -> Result<DancarEmbedding> {
    if dim == 0 {
        return Err(Error::Contract("embedding dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.node_count();
    let centers: Vec<f64> = (0..n * dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    DancarEmbedding::from_parts(dim, centers.clone(), centers, vec![INITIAL_RADIUS; n])
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainReport {
    /// Loss of each iteration's batches, evaluated before its update.
    pub history: Vec<LossBreakdown>,
    /// Wall-clock seconds per epoch, an epoch being `ceil(|E| / b1)`
    /// iterations. A trailing partial epoch is included.
    pub epoch_seconds: Vec<f64>,
    pub embedding: DancarEmbedding,
    pub seed: u64,
}

impl PartialEq for TrainReport {
    /// Timings are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.history == other.history && self.embedding == other.embedding && self.seed == other.seed
    }
}

/// Trains from the standard initialization.
pub fn train(g: &DirectedGraph, hp: &Hyperparams, dim: usize) -> Result<TrainReport> {
    let init = init_embedding(g, dim, hp.seed)?;
    train_from(g, hp, init)
}

/// Trains starting from `init`.
///
/// Each iteration draws `min(b1, |E|)` edges and `min(b1, |V|)` nodes (the
/// full sets when they fit, uniform with replacement otherwise) and `b2`
/// fresh negative pairs, takes one Adam step on the weighted loss and clamps
/// radii to [`MIN_RADIUS`]. Graphs without edges optimize only the negative
/// and anchor terms.
pub fn train_from(g: &DirectedGraph, hp: &Hyperparams, init: DancarEmbedding) -> Result<TrainReport> {
    hp.validate()?;
    if g.is_empty() {
        return Err(Error::Contract("cannot train on an empty graph".into()));
    }
    if init.node_count() != g.node_count() {
        return Err(Error::NodeMismatch(format!(
            "embedding has {} nodes, graph has {}",
            init.node_count(),
            g.node_count()
        )));
    }

    let mut emb = init;
    let mut report = TrainReport {
        history: Vec::with_capacity(hp.iterations),
        epoch_seconds: Vec::new(),
        embedding: emb.clone(),
        seed: hp.seed,
    };
    if hp.iterations == 0 {
        return Ok(report);
    }

    let sampler = if g.node_count() >= 2 {
        Some(NegativeSampler::new(g, hp.negative_mode)?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    rng.set_stream(1);

    let all_edges = g.edge_vec();
    let all_nodes: Vec<NodeId> = (0..g.node_count()).collect();
    let mut edge_batch: Vec<Edge> = Vec::with_capacity(hp.b1.min(all_edges.len()));
    let mut node_batch: Vec<NodeId> = Vec::with_capacity(hp.b1.min(all_nodes.len()));
    let mut negatives: Vec<Edge> = Vec::with_capacity(hp.b2);

    let adam = AdamConfig {
        alpha: hp.adam_alpha,
        beta1: hp.adam_beta1,
        beta2: hp.adam_beta2,
        eps: hp.adam_eps,
    };
    let mut state = AdamState::new(&[emb.anchors().len(), emb.centers().len(), emb.radii().len()]);
    let mut grads = Gradients::zeros_like(&emb);

    let epoch_len = all_edges.len().div_ceil(hp.b1).max(1);
    let mut epoch_start = Instant::now();

    for iter in 0..hp.iterations {
        let edges: &[Edge] = if all_edges.len() <= hp.b1 {
            &all_edges
        } else {
            edge_batch.clear();
            edge_batch.extend((0..hp.b1).map(|_| all_edges[rng.gen_range(0..all_edges.len())]));
            &edge_batch
        };
        let nodes: &[NodeId] = if all_nodes.len() <= hp.b1 {
            &all_nodes
        } else {
            node_batch.clear();
            node_batch.extend((0..hp.b1).map(|_| rng.gen_range(0..all_nodes.len())));
            &node_batch
        };
        match &sampler {
            Some(s) => s.sample_into(&mut rng, hp.b2, &mut negatives),
            None => negatives.clear(),
        }

        for block in [&mut grads.anchors, &mut grads.centers, &mut grads.radii] {
            block.fill(0.0);
        }
        let batch = LossBatch {
            edges,
            negatives: &negatives,
            nodes,
        };
        let loss = evaluate_batch(&emb, batch, hp, Some(&mut grads));
        report.history.push(loss);

        let blocks = grads.blocks();
        adam_step(&mut emb.blocks_mut(), &blocks, &mut state, &adam)?;
        emb.clamp_radii(MIN_RADIUS);

        if (iter + 1) % epoch_len == 0 || iter + 1 == hp.iterations {
            report.epoch_seconds.push(epoch_start.elapsed().as_secs_f64());
            epoch_start = Instant::now();
        }
    }
    report.embedding = emb;
    Ok(report)
}
