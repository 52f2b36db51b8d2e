use crate::graph::DirectedGraph;

/// Doubles every node `u` into `u_0` (id `u`) and `u_1` (id `|V| + u`), with
/// an edge `u_0 -> v_1` for each edge `u -> v` and for each `u = v`.
///
/// Every edge runs from the first half to the second, so the result is
/// bipartite and has no directed path of length two.
pub fn transform_to_bipartite(g: &DirectedGraph) -> DirectedGraph {
    let n = g.node_count();
    let edges = g
        .edges()
        .map(|(u, v)| (u, n + v))
        .chain((0..n).map(|u| (u, n + u)));
    let labels = (0..n)
        .map(|u| format!("{}_0", g.label(u)))
        .chain((0..n).map(|u| format!("{}_1", g.label(u))))
        .collect();
    DirectedGraph::from_edges(2 * n, edges).with_labels(labels)
}
