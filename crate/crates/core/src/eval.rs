//! Reconstruction and link-prediction scores, mean average precision and
//! Spearman rank correlation.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;

use crate::embedding::{DancarEmbedding, Model};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};
use crate::reconstruct::{reconstruct_adjacency, Scan};

/// Confusion counts of a predicted edge set against a reference edge set,
/// with optional ranking statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub map: Option<f64>,
    pub spearman: Option<f64>,
}

impl EvalReport {
    /// Derives precision, recall and F1 from counts. Empty denominators give 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
            map: None,
            spearman: None,
        }
    }

    pub fn predicted_edges(&self) -> usize {
        self.true_positives + self.false_positives
    }

    pub fn true_edges(&self) -> usize {
        self.true_positives + self.false_negatives
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("precision", format!("{:?}", self.precision)),
            ("recall", format!("{:?}", self.recall)),
            ("f1", format!("{:?}", self.f1)),
            ("true_positives", self.true_positives.to_string()),
            ("false_positives", self.false_positives.to_string()),
            ("false_negatives", self.false_negatives.to_string()),
            ("predicted_edges", self.predicted_edges().to_string()),
            ("true_edges", self.true_edges().to_string()),
        ];
        if let Some(map) = self.map {
            out.push(("map", format!("{map:?}")));
        }
        if let Some(rho) = self.spearman {
            out.push(("spearman", format!("{rho:?}")));
        }
        out
    }

    /// One `key=value` per line.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.fields() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// All fields on one space-separated line.
    pub fn to_line(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn check_nodes(g: &DirectedGraph, emb: &DancarEmbedding) -> Result<()> {
    if g.node_count() != emb.node_count() {
        return Err(Error::NodeMismatch(format!(
            "graph has {} nodes, embedding has {}",
            g.node_count(),
            emb.node_count()
        )));
    }
    Ok(())
}

fn score_against(reference: &DirectedGraph, emb: &DancarEmbedding, model: Model) -> EvalReport {
    let predicted = reconstruct_adjacency(emb, model, Scan::Auto);
    let (tp, total): (usize, usize) = predicted
        .par_iter()
        .enumerate()
        .map(|(v, ws)| (ws.iter().filter(|&&w| reference.has_edge(v, w)).count(), ws.len()))
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    EvalReport::from_counts(tp, total - tp, reference.edge_count() - tp)
}

/// Scores the edges reconstructed from `emb` against `g`'s edges.
pub fn reconstruction_report(g: &DirectedGraph, emb: &DancarEmbedding, model: Model) -> Result<EvalReport> {
    check_nodes(g, emb)?;
    Ok(score_against(g, emb, model))
}

/// Scores an embedding trained on `train` against the full edge set, so
/// held-out edges count as positives.
pub fn link_prediction_report(
    full: &DirectedGraph,
    train: &DirectedGraph,
    emb: &DancarEmbedding,
    model: Model,
) -> Result<EvalReport> {
    check_nodes(full, emb)?;
    if train.node_count() != full.node_count() {
        return Err(Error::NodeMismatch(format!(
            "training graph has {} nodes, full graph has {}",
            train.node_count(),
            full.node_count()
        )));
    }
    if let Some((v, w)) = train.edges().find(|&(v, w)| !full.has_edge(v, w)) {
        return Err(Error::Contract(format!(
            "training edge ({}, {}) missing from the full graph",
            train.label(v),
            train.label(w)
        )));
    }
    Ok(score_against(full, emb, model))
}

/// Which neighbor set a node's ranking is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Rank tails `w` by `ranker(v, w)` against the out-neighbors of `v`.
    #[default]
    Out,
    /// Rank heads `w` by `ranker(w, v)` against the in-neighbors of `v`.
    In,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "out" => Ok(Self::Out),
            "in" => Ok(Self::In),
            other => Err(Error::Config {
                key: "direction".into(),
                message: format!("expected out|in, got `{other}`"),
            }),
        }
    }
}

/// Average precision of node `v`'s true neighbors when all other nodes are
/// ranked by ascending score, ties by ascending id.
fn average_precision<F>(g: &DirectedGraph, v: NodeId, direction: Direction, ranker: &F) -> f64
where
    F: Fn(NodeId, NodeId) -> f64,
{
    let truth = match direction {
        Direction::Out => g.out_neighbors(v),
        Direction::In => g.in_neighbors(v),
    };
    let mut ranked: Vec<(f64, NodeId)> = (0..g.node_count())
        .filter(|&w| w != v)
        .map(|w| {
            let s = match direction {
                Direction::Out => ranker(v, w),
                Direction::In => ranker(w, v),
            };
            (s, w)
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &(_, w)) in ranked.iter().enumerate() {
        if truth.binary_search(&w).is_ok() {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
            if hits == truth.len() {
                break;
            }
        }
    }
    sum / truth.len() as f64
}

/// Mean over nodes with at least one true neighbor of the average precision
/// of that node's ranking. Lower scores rank first.
pub fn map_score<F>(g: &DirectedGraph, ranker: F, direction: Direction) -> Result<f64>
where
    F: Fn(NodeId, NodeId) -> f64 + Sync,
{
    let sources: Vec<NodeId> = (0..g.node_count())
        .filter(|&v| match direction {
            Direction::Out => g.out_degree(v) > 0,
            Direction::In => !g.in_neighbors(v).is_empty(),
        })
        .collect();
    if sources.is_empty() {
        return Err(Error::Undefined(
            "mAP needs a node with at least one neighbor".into(),
        ));
    }
    let aps: Vec<f64> = sources
        .par_iter()
        .map(|&v| average_precision(g, v, direction, &ranker))
        .collect();
    Ok(aps.iter().sum::<f64>() / aps.len() as f64)
}

/// mAP of an embedding ranked by its signed margin.
pub fn embedding_map(
    g: &DirectedGraph,
    emb: &DancarEmbedding,
    model: Model,
    direction: Direction,
) -> Result<f64> {
    check_nodes(g, emb)?;
    map_score(g, |v, w| emb.margin(model, v, w), direction)
}

/// Average ranks (1-based), ties sharing the mean of their positions.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap_or(Ordering::Equal));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg;
        }
        i = j + 1;
    }
    out
}

/// Spearman's rho: the Pearson correlation of the two rank vectors.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Contract(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Contract("need at least two observations".into()));
    }
    if xs.iter().chain(ys).any(|x| x.is_nan()) {
        return Err(Error::Undefined("NaN in input".into()));
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined("constant input vector".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman correlation between disk radius and out-degree over all nodes.
pub fn radius_degree_spearman(g: &DirectedGraph, emb: &DancarEmbedding) -> Result<f64> {
    check_nodes(g, emb)?;
    let degrees: Vec<f64> = (0..g.node_count()).map(|v| g.out_degree(v) as f64).collect();
    spearman(emb.radii(), &degrees)
}
