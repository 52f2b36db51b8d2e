use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::embedding::DancarEmbedding;
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

/// Geometry shared by every level of the planar tree layout.
///
/// Children of a disk of radius `r` get radius `t * r` and centers at
/// distance `k_scale * r` from the parent's center, fanned over angles
/// `alpha, alpha + pi/n, ...` relative to the parent's direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeLayoutConstants {
    /// Maximum number of children of any node.
    pub n: usize,
    pub alpha: f64,
    /// `cos(alpha)`.
    pub p: f64,
    /// `cos(2 alpha)`.
    pub q: f64,
    pub t: f64,
    pub k_scale: f64,
}

impl TreeLayoutConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract(
                "tree layout needs at least one child per parent".into(),
            ));
        }
        let nf = n as f64;
        let alpha = -(nf - 1.0) * PI / (2.0 * nf);
        let p = alpha.cos();
        let q = (2.0 * alpha).cos();
        let t = (((p + q) * (p + q) + 4.0 * p).sqrt() - p + q) / (2.0 * (q + 1.0));
        let k_scale = 1.0 / (1.0 + t * t).sqrt();
        Ok(Self {
            n,
            alpha,
            p,
            q,
            t,
            k_scale,
        })
    }

    /// Angular step between consecutive siblings.
    pub fn step(&self) -> f64 {
        PI / self.n as f64
    }
}

/// Checks that `g` is an out-tree rooted at `root` spanning every node.
fn check_out_tree(g: &DirectedGraph, root: NodeId) -> Result<()> {
    let n = g.node_count();
    if root >= n {
        return Err(Error::NotATree(format!("root {root} out of range")));
    }
    if !g.in_neighbors(root).is_empty() {
        return Err(Error::NotATree(format!("root `{}` has a parent", g.label(root))));
    }
    for v in 0..n {
        if v != root && g.in_neighbors(v).len() != 1 {
            return Err(Error::NotATree(format!(
                "node `{}` has {} parents",
                g.label(v),
                g.in_neighbors(v).len()
            )));
        }
    }
    // n - 1 edges with single parents: unreachable nodes must sit on cycles.
    let mut seen = vec![false; n];
    let mut stack = vec![root];
    seen[root] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for &w in g.out_neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    if reached != n {
        let v = seen.iter().position(|s| !s).expect("unreached node");
        return Err(Error::NotATree(format!(
            "node `{}` is not reachable from the root",
            g.label(v)
        )));
    }
    Ok(())
}

/// Planar layout of a rooted out-tree in which every child's anchor lies in
/// its parent's disk.
///
/// The root gets the unit disk at the origin. Nodes are placed breadth-first;
/// children are visited in ascending id order. Anchors coincide with centers.
pub fn embed_tree(tree: &DirectedGraph, root: NodeId) -> Result<DancarEmbedding> {
    check_out_tree(tree, root)?;
    let nodes = tree.node_count();
    let mut emb = DancarEmbedding::zeros(nodes, 2);
    let max_children = (0..nodes).map(|v| tree.out_degree(v)).max().unwrap_or(0);
    if max_children == 0 {
        return Ok(emb);
    }
    let layout = TreeLayoutConstants::new(max_children)?;

    let mut theta = vec![0.0; nodes];
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let cu = [emb.center(u)[0], emb.center(u)[1]];
        let ru = emb.radius(u);
        let mut phi = layout.alpha;
        for &v in tree.out_neighbors(u) {
            theta[v] = theta[u] + phi;
            let offset = ru * layout.k_scale;
            let cv = [cu[0] + offset * theta[v].cos(), cu[1] + offset * theta[v].sin()];
            emb.center_mut(v).copy_from_slice(&cv);
            emb.anchor_mut(v).copy_from_slice(&cv);
            emb.set_radius(v, layout.t * ru);
            queue.push_back(v);
            phi += layout.step();
        }
    }
    Ok(emb)
}
