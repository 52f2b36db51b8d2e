//! Text formats for embeddings and Poincaré points, plus the loss log.
//!
//! Embedding file:
//!
//! ```text
//! dancar <k> <|V|>
//! <label> x_1 .. x_k c_1 .. c_k r
//! ```
//!
//! Floats are written in Rust's shortest round-trip notation, so reading a
//! written file reproduces the embedding bit for bit.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::analytic::PoincarePoint;
use crate::embedding::DancarEmbedding;
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::loss::LossBreakdown;

const MAGIC: &str = "dancar";

/// Serializes an embedding with one label per node.
pub fn write_embedding(emb: &DancarEmbedding, labels: &[String]) -> Result<String> {
    if labels.len() != emb.node_count() {
        return Err(Error::NodeMismatch(format!(
            "{} labels for {} nodes",
            labels.len(),
            emb.node_count()
        )));
    }
    if let Some(bad) = labels
        .iter()
        .find(|l| l.is_empty() || l.chars().any(char::is_whitespace))
    {
        return Err(Error::Contract(format!(
            "label `{bad}` is empty or contains whitespace"
        )));
    }
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {} {}", emb.dim(), emb.node_count());
    for (v, label) in labels.iter().enumerate() {
        out.push_str(label);
        for x in emb.anchor(v).iter().chain(emb.center(v)) {
            let _ = write!(out, " {x:?}");
        }
        let _ = writeln!(out, " {:?}", emb.radius(v));
    }
    Ok(out)
}

fn parse_float(token: &str, line: usize) -> Result<f64> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid number `{token}`"),
    })
}

/// An embedding together with its node labels, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEmbedding {
    pub labels: Vec<String>,
    pub embedding: DancarEmbedding,
}

pub fn read_embedding(text: &str) -> Result<LabeledEmbedding> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 3 || head[0] != MAGIC {
        return Err(Error::Parse {
            line: hline,
            message: format!("expected `{MAGIC} <k> <nodes>` header"),
        });
    }
    let parse_count = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: hline,
            message: format!("invalid count `{s}`"),
        })
    };
    let dim = parse_count(head[1])?;
    let nodes = parse_count(head[2])?;
    if dim == 0 {
        return Err(Error::Parse {
            line: hline,
            message: "dimension must be at least 1".into(),
        });
    }

    let mut labels = Vec::with_capacity(nodes);
    let mut anchors = Vec::with_capacity(nodes * dim);
    let mut centers = Vec::with_capacity(nodes * dim);
    let mut radii = Vec::with_capacity(nodes);
    for (line, body) in lines {
        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() != 2 * dim + 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected label and {} numbers", 2 * dim + 1),
            });
        }
        labels.push(tokens[0].to_owned());
        for (i, tok) in tokens[1..].iter().enumerate() {
            let x = parse_float(tok, line)?;
            if i < dim {
                anchors.push(x);
            } else if i < 2 * dim {
                centers.push(x);
            } else {
                radii.push(x);
            }
        }
    }
    if labels.len() != nodes {
        return Err(Error::Parse {
            line: hline,
            message: format!("header announces {nodes} nodes, found {}", labels.len()),
        });
    }
    let embedding = DancarEmbedding::from_parts(dim, anchors, centers, radii)?;
    Ok(LabeledEmbedding { labels, embedding })
}

impl LabeledEmbedding {
    /// Matches nodes to `g` by label. Every graph node must appear in the
    /// embedding; embedding nodes absent from the graph are appended to it
    /// as isolated nodes. Returns the extended graph and the embedding
    /// reordered to its node ids.
    pub fn align(&self, g: &DirectedGraph) -> Result<(DirectedGraph, DancarEmbedding)> {
        let index: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut order = Vec::with_capacity(self.labels.len());
        let mut used = vec![false; self.labels.len()];
        for v in 0..g.node_count() {
            let label = g.label(v);
            let &i = index
                .get(label.as_ref())
                .ok_or_else(|| Error::NodeMismatch(format!("node `{label}` has no embedding")))?;
            used[i] = true;
            order.push(i);
        }
        let mut graph_labels = g.label_table();
        for (i, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
            order.push(i);
            graph_labels.push(self.labels[i].clone());
        }
        let emb = &self.embedding;
        let dim = emb.dim();
        let mut anchors = Vec::with_capacity(order.len() * dim);
        let mut centers = Vec::with_capacity(order.len() * dim);
        let mut radii = Vec::with_capacity(order.len());
        for &i in &order {
            anchors.extend_from_slice(emb.anchor(i));
            centers.extend_from_slice(emb.center(i));
            radii.push(emb.radius(i));
        }
        let graph = DirectedGraph::from_edges(order.len(), g.edges()).with_labels(graph_labels);
        let embedding = DancarEmbedding::from_parts(dim, anchors, centers, radii)?;
        Ok((graph, embedding))
    }
}

/// Reads `label x_1 .. x_k` lines.
pub fn read_poincare_points(text: &str) -> Result<(Vec<String>, Vec<PoincarePoint>)> {
    let mut labels = Vec::new();
    let mut points = Vec::new();
    let mut dim = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let k = tokens.len() - 1;
        if k == 0 || dim.is_some_and(|d| d != k) {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected a label and {} coordinates", dim.unwrap_or(k.max(1))),
            });
        }
        dim = Some(k);
        let coords = tokens[1..]
            .iter()
            .map(|t| parse_float(t, idx + 1))
            .collect::<Result<Vec<_>>>()?;
        let point = PoincarePoint::new(coords).map_err(|e| Error::Parse {
            line: idx + 1,
            message: e.to_string(),
        })?;
        labels.push(tokens[0].to_owned());
        points.push(point);
    }
    Ok((labels, points))
}

/// CSV loss log with header `iter,l_pos,l_neg,l_anc,total`.
pub fn loss_log_csv(history: &[LossBreakdown]) -> String {
    let mut out = String::from("iter,l_pos,l_neg,l_anc,total\n");
    for (i, l) in history.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?}",
            i + 1,
            l.l_pos,
            l.l_neg,
            l.l_anc,
            l.total
        );
    }
    out
}
