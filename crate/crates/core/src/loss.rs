//! Margin losses over edge, non-edge and anchor batches, with their exact
//! analytic gradients.
//!
//! Every loss term has the shape `ReLU(t)` with
//! `t = sign * |a - b| + sum_i coef_i * r_i + margin`, where `a` and `b` are
//! points of two nodes (a center, an anchor) and the `r_i` are radii. The
//! DANCAR terms and the disk-baseline terms differ only in their points
//! and coefficients, so one evaluator serves them all.

use rayon::prelude::*;

use crate::embedding::{DancarEmbedding, Model};
use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId};
use crate::params::Hyperparams;

/// Values of the three losses and their weighted total.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossBreakdown {
    pub l_pos: f64,
    pub l_neg: f64,
    pub l_anc: f64,
    pub total: f64,
}

/// The three minibatches a loss evaluation consumes.
#[derive(Debug, Clone, Copy)]
pub struct LossBatch<'a> {
    pub edges: &'a [Edge],
    pub negatives: &'a [Edge],
    pub nodes: &'a [NodeId],
}

/// Gradient arrays laid out like the embedding's parameter blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub anchors: Vec<f64>,
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(emb: &DancarEmbedding) -> Self {
        Self {
            anchors: vec![0.0; emb.anchors().len()],
            centers: vec![0.0; emb.centers().len()],
            radii: vec![0.0; emb.radii().len()],
        }
    }

    pub fn blocks(&self) -> [(&'static str, &[f64]); 3] {
        [
            ("anchors", &self.anchors),
            ("centers", &self.centers),
            ("radii", &self.radii),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Positive,
    Negative,
    Anchor,
}

#[derive(Clone, Copy)]
enum Point {
    Anchor(NodeId),
    Center(NodeId),
}

struct Term {
    a: Point,
    b: Point,
    sign: f64,
    radii: [(NodeId, f64); 2],
    radius_terms: usize,
}

impl Term {
    fn new(model: Model, kind: Kind, (v, w): Edge) -> Self {
        let flip = if kind == Kind::Negative { -1.0 } else { 1.0 };
        match model {
            Model::Dancar => Self {
                a: Point::Center(v),
                b: Point::Anchor(w),
                sign: flip,
                radii: [(v, -flip), (v, 0.0)],
                radius_terms: 1,
            },
            Model::Disk => Self {
                a: Point::Center(v),
                b: Point::Center(w),
                sign: flip,
                radii: [(v, flip), (w, -flip)],
                radius_terms: 2,
            },
        }
    }
}

fn point(emb: &DancarEmbedding, p: Point) -> &[f64] {
    match p {
        Point::Anchor(v) => emb.anchor(v),
        Point::Center(v) => emb.center(v),
    }
}

/// Pre-activation of one term, and optionally the unit vector `(a - b)/|a - b|`
/// (zero when the points coincide).
fn evaluate(emb: &DancarEmbedding, term: &Term, margin: f64, dir: Option<&mut [f64]>) -> f64 {
    let a = point(emb, term.a);
    let b = point(emb, term.b);
    let d = crate::embedding::distance(a, b);
    let mut t = term.sign * d + margin;
    for &(node, coef) in &term.radii[..term.radius_terms] {
        t += coef * emb.radius(node);
    }
    if let Some(dir) = dir {
        if d > 0.0 {
            for ((o, x), y) in dir.iter_mut().zip(a).zip(b) {
                *o = (x - y) / d;
            }
        } else {
            dir.fill(0.0);
        }
    }
    t
}

/// Minimum number of terms handed to one rayon task.
const PAR_MIN_TERMS: usize = 2048;

/// Mean ReLU over a batch, accumulating `weight * dReLU/dparam` into `grads`.
///
/// Term pre-activations and directions are computed in parallel; the sum and
/// the scatter into `grads` run serially in batch order, so the result does
/// not depend on the thread count.
fn accumulate(
    emb: &DancarEmbedding,
    model: Model,
    kind: Kind,
    pairs: &[Edge],
    margin: f64,
    weight: f64,
    grads: Option<&mut Gradients>,
) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let k = emb.dim();
    let scale = 1.0 / pairs.len() as f64;
    let Some(grads) = grads else {
        let values: Vec<f64> = pairs
            .par_iter()
            .with_min_len(PAR_MIN_TERMS)
            .map(|&p| evaluate(emb, &Term::new(model, kind, p), margin, None))
            .collect();
        return values.iter().map(|t| t.max(0.0)).sum::<f64>() * scale;
    };

    let stride = k + 1;
    let mut buf = vec![0.0; pairs.len() * stride];
    buf.par_chunks_mut(stride)
        .with_min_len(PAR_MIN_TERMS)
        .zip(pairs.par_iter().with_min_len(PAR_MIN_TERMS))
        .for_each(|(slot, &p)| {
            let (t, dir) = slot.split_first_mut().expect("stride >= 2");
            *t = evaluate(emb, &Term::new(model, kind, p), margin, Some(dir));
        });

    let step = weight * scale;
    let mut sum = 0.0;
    for (slot, &p) in buf.chunks_exact(stride).zip(pairs) {
        let t = slot[0];
        // ReLU'(0) is taken as 0.
        if t <= 0.0 {
            continue;
        }
        sum += t;
        if step == 0.0 {
            continue;
        }
        let term = Term::new(model, kind, p);
        let s = step * term.sign;
        let dir = &slot[1..];
        add_scaled(grads, term.a, dir, s, k);
        add_scaled(grads, term.b, dir, -s, k);
        for &(node, coef) in &term.radii[..term.radius_terms] {
            grads.radii[node] += step * coef;
        }
    }
    sum * scale
}

fn add_scaled(grads: &mut Gradients, p: Point, dir: &[f64], s: f64, k: usize) {
    let (block, v) = match p {
        Point::Anchor(v) => (&mut grads.anchors, v),
        Point::Center(v) => (&mut grads.centers, v),
    };
    for (g, d) in block[v * k..(v + 1) * k].iter_mut().zip(dir) {
        *g += s * d;
    }
}

fn anchor_pairs(nodes: &[NodeId]) -> Vec<Edge> {
    nodes.iter().map(|&v| (v, v)).collect()
}

fn check_pairs(emb: &DancarEmbedding, pairs: &[Edge], what: &'static str) -> Result<()> {
    if pairs.is_empty() {
        return Err(Error::EmptyBatch(what));
    }
    let n = emb.node_count();
    for &(v, w) in pairs {
        if v >= n || w >= n {
            return Err(Error::Contract(format!("pair ({v}, {w}) out of range")));
        }
        if v == w {
            return Err(Error::Contract(format!("self pair ({v}, {v}) in {what} batch")));
        }
    }
    Ok(())
}

fn check_nodes(emb: &DancarEmbedding, nodes: &[NodeId]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::EmptyBatch("anchor"));
    }
    if let Some(&v) = nodes.iter().find(|&&v| v >= emb.node_count()) {
        return Err(Error::Contract(format!("node {v} out of range")));
    }
    Ok(())
}

/// Mean of `ReLU(|c_v - x_w| - r_v + margin)` over the edge batch.
pub fn positive_loss(emb: &DancarEmbedding, edges: &[Edge], margin: f64) -> Result<f64> {
    check_pairs(emb, edges, "positive")?;
    Ok(accumulate(
        emb,
        Model::Dancar,
        Kind::Positive,
        edges,
        margin,
        1.0,
        None,
    ))
}

/// Mean of `ReLU(r_v - |c_v - x_w| + margin)` over the non-edge batch.
pub fn negative_loss(emb: &DancarEmbedding, pairs: &[Edge], margin: f64) -> Result<f64> {
    check_pairs(emb, pairs, "negative")?;
    Ok(accumulate(
        emb,
        Model::Dancar,
        Kind::Negative,
        pairs,
        margin,
        1.0,
        None,
    ))
}

/// Mean of `ReLU(|c_v - x_v| - r_v + margin)` over the node batch.
pub fn anchor_loss(emb: &DancarEmbedding, nodes: &[NodeId], margin: f64) -> Result<f64> {
    check_nodes(emb, nodes)?;
    let pairs = anchor_pairs(nodes);
    Ok(accumulate(
        emb,
        Model::Dancar,
        Kind::Anchor,
        &pairs,
        margin,
        1.0,
        None,
    ))
}

/// Weighted total loss. Every batch must be non-empty, except the node batch
/// under the disk baseline, which has no anchor term.
pub fn total_loss(emb: &DancarEmbedding, batch: LossBatch<'_>, hp: &Hyperparams) -> Result<LossBreakdown> {
    check_batch(emb, batch, hp.model)?;
    Ok(evaluate_batch(emb, batch, hp, None))
}

/// Total loss together with its gradient with respect to every parameter.
pub fn loss_gradients(
    emb: &DancarEmbedding,
    batch: LossBatch<'_>,
    hp: &Hyperparams,
) -> Result<(LossBreakdown, Gradients)> {
    check_batch(emb, batch, hp.model)?;
    let mut grads = Gradients::zeros_like(emb);
    let loss = evaluate_batch(emb, batch, hp, Some(&mut grads));
    Ok((loss, grads))
}

fn check_batch(emb: &DancarEmbedding, batch: LossBatch<'_>, model: Model) -> Result<()> {
    check_pairs(emb, batch.edges, "positive")?;
    check_pairs(emb, batch.negatives, "negative")?;
    if model == Model::Dancar {
        check_nodes(emb, batch.nodes)?;
    }
    Ok(())
}

/// Unchecked evaluation; an empty batch contributes zero.
pub(crate) fn evaluate_batch(
    emb: &DancarEmbedding,
    batch: LossBatch<'_>,
    hp: &Hyperparams,
    mut grads: Option<&mut Gradients>,
) -> LossBreakdown {
    let model = hp.model;
    let margin = hp.margin;
    let l_pos = accumulate(
        emb,
        model,
        Kind::Positive,
        batch.edges,
        margin,
        1.0,
        grads.as_deref_mut(),
    );
    let l_neg = accumulate(
        emb,
        model,
        Kind::Negative,
        batch.negatives,
        margin,
        hp.lambda_neg,
        grads.as_deref_mut(),
    );
    let l_anc = match model {
        Model::Dancar => {
            let pairs = anchor_pairs(batch.nodes);
            accumulate(emb, model, Kind::Anchor, &pairs, margin, hp.lambda_anc, grads)
        }
        Model::Disk => 0.0,
    };
    LossBreakdown {
        l_pos,
        l_neg,
        l_anc,
        total: l_pos + hp.lambda_neg * l_neg + hp.lambda_anc * l_anc,
    }
}
