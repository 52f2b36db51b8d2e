//! Simple directed graphs over dense node ids, with edge-list ingestion
//! and the graph transformations used for training and evaluation.

use std::borrow::Cow;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Dense node identifier in `0..node_count`.
pub type NodeId = usize;

/// An ordered pair `(head, tail)` read as the directed edge `head -> tail`.
pub type Edge = (NodeId, NodeId);

/// A simple directed graph: no self-loops, no parallel edges.
///
/// Adjacency lists are kept sorted, so edge iteration order is
/// lexicographic in `(head, tail)` and membership is a binary search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    labels: Option<Vec<String>>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

/// Counters for input edges dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub duplicates: usize,
    pub self_loops: usize,
}

/// Result of [`parse_edge_list`].
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: DirectedGraph,
    pub stats: BuildStats,
}

impl DirectedGraph {
    /// Graph with `node_count` isolated nodes.
    pub fn empty(node_count: usize) -> Self {
        Self {
            labels: None,
            out_adj: vec![Vec::new(); node_count],
            in_adj: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    /// Builds a graph from an edge list, dropping self-loops and duplicates.
    ///
    /// Panics if an endpoint is `>= node_count`.
    pub fn from_edges_with_stats<I>(node_count: usize, edges: I) -> (Self, BuildStats)
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut out_adj = vec![Vec::new(); node_count];
        let mut stats = BuildStats::default();
        for (v, w) in edges {
            assert!(
                v < node_count && w < node_count,
                "edge ({v}, {w}) out of range for {node_count} nodes"
            );
            if v == w {
                stats.self_loops += 1;
                continue;
            }
            out_adj[v].push(w);
        }
        let mut in_adj = vec![Vec::new(); node_count];
        let mut edge_count = 0;
        for (v, list) in out_adj.iter_mut().enumerate() {
            let before = list.len();
            list.sort_unstable();
            list.dedup();
            stats.duplicates += before - list.len();
            edge_count += list.len();
            for &w in list.iter() {
                in_adj[w].push(v);
            }
        }
        // in_adj is filled in ascending head order, hence already sorted.
        let graph = Self {
            labels: None,
            out_adj,
            in_adj,
            edge_count,
        };
        (graph, stats)
    }

    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = Edge>,
    {
        Self::from_edges_with_stats(node_count, edges).0
    }

    /// Attaches a label table. Panics if its length differs from the node count.
    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.node_count(), "label table length");
        self.labels = Some(labels);
        self
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.out_adj.is_empty()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of `v`, falling back to the decimal id when no table is attached.
    pub fn label(&self, v: NodeId) -> Cow<'_, str> {
        match &self.labels {
            Some(labels) => Cow::Borrowed(labels[v].as_str()),
            None => Cow::Owned(v.to_string()),
        }
    }

    /// Label table, materialized from ids when none is attached.
    pub fn label_table(&self) -> Vec<String> {
        (0..self.node_count())
            .map(|v| self.label(v).into_owned())
            .collect()
    }

    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_adj[v].len()
    }

    pub fn has_edge(&self, v: NodeId, w: NodeId) -> bool {
        self.out_adj[v].binary_search(&w).is_ok()
    }

    /// Edges in lexicographic `(head, tail)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(v, list)| list.iter().map(move |&w| (v, w)))
    }

    pub fn edge_vec(&self) -> Vec<Edge> {
        self.edges().collect()
    }

    /// Fraction of ordered pairs `v != w` that are edges.
    pub fn density(&self) -> f64 {
        let n = self.node_count();
        if n < 2 {
            return 0.0;
        }
        self.edge_count as f64 / (n * (n - 1)) as f64
    }

    /// Number of ordered non-edge pairs with distinct endpoints.
    pub fn complement_count(&self) -> usize {
        let n = self.node_count();
        (n * n.saturating_sub(1)) - self.edge_count
    }

    /// Same node set (and labels) with a different edge set.
    pub fn with_edges<I>(&self, edges: I) -> Self
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = Self::from_edges(self.node_count(), edges);
        g.labels = self.labels.clone();
        g
    }

    /// Subgraph induced by `nodes`, renumbered densely in the given order.
    /// The original labels (or ids, when unlabeled) become the label table.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> Self {
        let mut index = vec![usize::MAX; self.node_count()];
        for (new, &old) in nodes.iter().enumerate() {
            index[old] = new;
        }
        let edges = nodes.iter().flat_map(|&v| {
            let index = &index;
            self.out_adj[v]
                .iter()
                .filter(move |&&w| index[w] != usize::MAX)
                .map(move |&w| (index[v], index[w]))
        });
        let labels = nodes.iter().map(|&v| self.label(v).into_owned()).collect();
        Self::from_edges(nodes.len(), edges.collect::<Vec<_>>()).with_labels(labels)
    }

    /// Serializes as an edge list, one `head tail` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (v, w) in self.edges() {
            let _ = writeln!(out, "{} {}", self.label(v), self.label(w));
        }
        out
    }

    /// A topological order, or the id of a node lying on a directed cycle.
    pub fn topological_order(&self) -> std::result::Result<Vec<NodeId>, NodeId> {
        let n = self.node_count();
        let mut indegree: Vec<usize> = self.in_adj.iter().map(Vec::len).collect();
        let mut queue: VecDeque<NodeId> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.out_adj[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node has a leftover predecessor; walking predecessors
        // must revisit a node, and the first revisited node lies on a cycle.
        let mut seen = vec![false; n];
        let mut v = (0..n).find(|&v| indegree[v] > 0).expect("leftover node");
        while !seen[v] {
            seen[v] = true;
            v = *self.in_adj[v]
                .iter()
                .find(|&&u| indegree[u] > 0)
                .expect("leftover predecessor");
        }
        Err(v)
    }
}

impl FromStr for DirectedGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_edge_list(s).map(|p| p.graph)
    }
}

/// Parses a whitespace-separated `head tail` edge list.
///
/// Labels are interned in first-appearance order. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_edge_list<'a>(text: &'a str) -> Result<ParsedGraph> {
    let mut ids: HashMap<&'a str, NodeId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected 2 tokens, found {}", tokens.len()),
            });
        }
        let mut intern = |label: &'a str| -> NodeId {
            *ids.entry(label).or_insert_with(|| {
                labels.push(label.to_owned());
                labels.len() - 1
            })
        };
        let v = intern(tokens[0]);
        let w = intern(tokens[1]);
        edges.push((v, w));
    }
    let (graph, stats) = DirectedGraph::from_edges_with_stats(labels.len(), edges);
    Ok(ParsedGraph {
        graph: graph.with_labels(labels),
        stats,
    })
}

/// Adds `(u, w)` for every directed path `u ~> w` of length at least one.
///
/// Fails on cyclic input, naming a node on a cycle.
pub fn transitive_closure(g: &DirectedGraph) -> Result<DirectedGraph> {
    if let Err(node) = g.topological_order() {
        return Err(Error::Cycle {
            node: g.label(node).into_owned(),
        });
    }
    let n = g.node_count();
    let mut stamp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut edges = Vec::new();
    for source in 0..n {
        stamp[source] = source;
        stack.extend_from_slice(g.out_neighbors(source));
        while let Some(v) = stack.pop() {
            if stamp[v] == source {
                continue;
            }
            stamp[v] = source;
            edges.push((source, v));
            stack.extend(g.out_neighbors(v).iter().filter(|&&w| stamp[w] != source));
        }
    }
    Ok(g.with_edges(edges))
}

/// Node sets of the weakly connected components, each sorted ascending,
/// listed in order of their smallest node id.
pub fn weakly_connected_components(g: &DirectedGraph) -> Vec<Vec<NodeId>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut frontier = vec![start];
        while let Some(v) = frontier.pop() {
            for &w in g.out_neighbors(v).iter().chain(g.in_neighbors(v)) {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                    frontier.push(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

/// Induced subgraph on the largest weakly connected component.
///
/// Ties go to the component with the smallest minimum node id.
pub fn largest_weakly_connected_component(g: &DirectedGraph) -> DirectedGraph {
    let mut best: Option<Vec<NodeId>> = None;
    for comp in weakly_connected_components(g) {
        if best.as_ref().is_none_or(|b| comp.len() > b.len()) {
            best = Some(comp);
        }
    }
    match best {
        Some(nodes) => g.induced_subgraph(&nodes),
        None => g.clone(),
    }
}

/// Training/held-out partition of an edge set.
#[derive(Debug, Clone)]
pub struct EdgeSplit {
    pub train: DirectedGraph,
    pub held_out: Vec<Edge>,
}

/// Uniformly partitions the edges; the training graph keeps every node.
pub fn split_edges(g: &DirectedGraph, train_fraction: f64, seed: u64) -> Result<EdgeSplit> {
    if !(train_fraction > 0.0 && train_fraction <= 1.0) {
        return Err(Error::Contract(format!(
            "train fraction must lie in (0, 1], got {train_fraction}"
        )));
    }
    let mut edges = g.edge_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    edges.shuffle(&mut rng);
    let keep = ((train_fraction * edges.len() as f64).round() as usize).min(edges.len());
    let held_out = edges.split_off(keep);
    Ok(EdgeSplit {
        train: g.with_edges(edges),
        held_out,
    })
}

/// How negative (non-edge) pairs are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeMode {
    /// Uniform over the complement `{(v, w) : v != w, (v, w) not an edge}`.
    #[default]
    Exact,
    /// Uniform over all ordered pairs with `v != w`.
    Approximate,
}

impl FromStr for NegativeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "approximate" | "approx" => Ok(Self::Approximate),
            other => Err(Error::Config {
                key: "negative_mode".into(),
                message: format!("expected exact|approximate, got `{other}`"),
            }),
        }
    }
}

impl std::fmt::Display for NegativeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Approximate => "approximate",
        })
    }
}

/// Density above which exact sampling switches from rejection to an
/// explicit complement list.
const ENUMERATION_DENSITY: f64 = 0.5;

/// Reusable sampler of ordered non-edge pairs.
#[derive(Debug, Clone)]
pub struct NegativeSampler<'g> {
    graph: &'g DirectedGraph,
    mode: NegativeMode,
    complement: Option<Vec<Edge>>,
}

impl<'g> NegativeSampler<'g> {
    pub fn new(graph: &'g DirectedGraph, mode: NegativeMode) -> Result<Self> {
        if graph.node_count() < 2 {
            return Err(Error::Contract(
                "negative sampling needs at least two nodes".into(),
            ));
        }
        let mut complement = None;
        if mode == NegativeMode::Exact {
            if graph.complement_count() == 0 {
                return Err(Error::NoNegativePairs);
            }
            if graph.density() > ENUMERATION_DENSITY {
                let n = graph.node_count();
                let pairs = (0..n)
                    .flat_map(|v| (0..n).map(move |w| (v, w)))
                    .filter(|&(v, w)| v != w && !graph.has_edge(v, w))
                    .collect();
                complement = Some(pairs);
            }
        }
        Ok(Self {
            graph,
            mode,
            complement,
        })
    }

    pub fn mode(&self) -> NegativeMode {
        self.mode
    }

    fn distinct_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Edge {
        let n = self.graph.node_count();
        let v = rng.gen_range(0..n);
        let mut w = rng.gen_range(0..n - 1);
        if w >= v {
            w += 1;
        }
        (v, w)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Edge {
        if let Some(pairs) = &self.complement {
            return pairs[rng.gen_range(0..pairs.len())];
        }
        loop {
            let (v, w) = self.distinct_pair(rng);
            if self.mode == NegativeMode::Approximate || !self.graph.has_edge(v, w) {
                return (v, w);
            }
        }
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, count: usize, out: &mut Vec<Edge>) {
        out.clear();
        out.extend((0..count).map(|_| self.sample_one(rng)));
    }
}

/// Draws `count` negative pairs with a fresh RNG seeded from `seed`.
pub fn sample_negative_pairs(
    g: &DirectedGraph,
    count: usize,
    seed: u64,
    mode: NegativeMode,
) -> Result<Vec<Edge>> {
    let sampler = NegativeSampler::new(g, mode)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    sampler.sample_into(&mut rng, count, &mut out);
    Ok(out)
}
