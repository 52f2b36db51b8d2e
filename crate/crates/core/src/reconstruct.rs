//! Edge reconstruction: all ordered pairs `(v, w)` whose signed margin is
//! non-positive.
//!
//! The all-pairs scan runs in parallel over source nodes. The grid scan
//! buckets target points on a uniform grid over their first one or two
//! coordinates; since projection never increases distance, a target whose
//! projection lies outside the source's query box cannot be contained and
//! is skipped. Surviving candidates go through the same margin test as the
//! brute-force scan, so both produce identical edge sets.

use rayon::prelude::*;

use crate::embedding::{DancarEmbedding, Model};
use crate::graph::{Edge, NodeId};

/// How the all-pairs scan enumerates candidate targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scan {
    BruteForce,
    Grid,
    /// Grid for larger node sets, brute force otherwise.
    Auto,
}

const AUTO_GRID_MIN_NODES: usize = 256;
const MAX_CELLS_PER_AXIS: usize = 4096;

/// Is `(v, w)` reconstructed as an edge? Boundary contact counts.
#[inline]
pub fn is_edge(emb: &DancarEmbedding, model: Model, v: NodeId, w: NodeId) -> bool {
    v != w && emb.margin(model, v, w) <= 0.0
}

/// Reconstructed out-neighbors of every node, each list ascending.
pub fn reconstruct_adjacency(emb: &DancarEmbedding, model: Model, scan: Scan) -> Vec<Vec<NodeId>> {
    let n = emb.node_count();
    let use_grid = match scan {
        Scan::BruteForce => false,
        Scan::Grid => true,
        Scan::Auto => n >= AUTO_GRID_MIN_NODES,
    };
    if use_grid {
        let grid = Grid::build(emb, model);
        (0..n)
            .into_par_iter()
            .map(|v| grid.out_neighbors(emb, model, v))
            .collect()
    } else {
        (0..n)
            .into_par_iter()
            .map(|v| (0..n).filter(|&w| is_edge(emb, model, v, w)).collect())
            .collect()
    }
}

/// All reconstructed edges in lexicographic order.
pub fn reconstruct_edges(emb: &DancarEmbedding, model: Model, scan: Scan) -> Vec<Edge> {
    reconstruct_adjacency(emb, model, scan)
        .into_iter()
        .enumerate()
        .flat_map(|(v, ws)| ws.into_iter().map(move |w| (v, w)))
        .collect()
}

/// The subset of `pairs` reconstructed as edges, in input order.
pub fn reconstruct_pairs(emb: &DancarEmbedding, model: Model, pairs: &[Edge]) -> Vec<Edge> {
    pairs
        .iter()
        .copied()
        .filter(|&(v, w)| is_edge(emb, model, v, w))
        .collect()
}

/// Target points bucketed by the cell of their leading coordinates.
struct Grid {
    axes: usize,
    cells: usize,
    origin: [f64; 2],
    width: [f64; 2],
    /// CSR layout: `members[starts[c]..starts[c + 1]]` are the nodes in cell `c`.
    starts: Vec<usize>,
    members: Vec<NodeId>,
    max_radius: f64,
}

impl Grid {
    fn target_point(emb: &DancarEmbedding, model: Model, w: NodeId) -> &[f64] {
        match model {
            Model::Dancar => emb.anchor(w),
            Model::Disk => emb.center(w),
        }
    }

    fn build(emb: &DancarEmbedding, model: Model) -> Self {
        let n = emb.node_count();
        let axes = emb.dim().min(2);
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for w in 0..n {
            let p = Self::target_point(emb, model, w);
            for a in 0..axes {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        let per_axis = if axes == 1 {
            n
        } else {
            (n as f64).sqrt().ceil() as usize
        };
        let cells = per_axis.clamp(1, MAX_CELLS_PER_AXIS);
        let mut origin = [0.0; 2];
        let mut width = [1.0; 2];
        for a in 0..axes {
            origin[a] = lo[a];
            let extent = hi[a] - lo[a];
            width[a] = if extent > 0.0 { extent / cells as f64 } else { 1.0 };
        }
        let mut grid = Self {
            axes,
            cells,
            origin,
            width,
            starts: Vec::new(),
            members: Vec::new(),
            max_radius: emb.radii().iter().copied().fold(0.0, f64::max),
        };

        let cell_of: Vec<usize> = (0..n)
            .map(|w| grid.cell_index(Self::target_point(emb, model, w)))
            .collect();
        let total = grid.cells.pow(axes as u32);
        let mut starts = vec![0usize; total + 1];
        for &c in &cell_of {
            starts[c + 1] += 1;
        }
        for c in 0..total {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut members = vec![0; n];
        for (w, &c) in cell_of.iter().enumerate() {
            members[fill[c]] = w;
            fill[c] += 1;
        }
        grid.starts = starts;
        grid.members = members;
        grid
    }

    fn axis_cell(&self, a: usize, x: f64) -> usize {
        let raw = ((x - self.origin[a]) / self.width[a]).floor();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.cells - 1)
        }
    }

    fn cell_index(&self, p: &[f64]) -> usize {
        let mut idx = 0;
        for a in (0..self.axes).rev() {
            idx = idx * self.cells + self.axis_cell(a, p[a]);
        }
        idx
    }

    fn out_neighbors(&self, emb: &DancarEmbedding, model: Model, v: NodeId) -> Vec<NodeId> {
        let reach = match model {
            Model::Dancar => emb.radius(v),
            Model::Disk => self.max_radius - emb.radius(v),
        };
        if reach < 0.0 {
            return Vec::new();
        }
        // Widen the box slightly so rounding in the cell computation never
        // drops a pair that the exact test would accept.
        let reach = reach + 1e-9 * (1.0 + reach);
        let c = emb.center(v);
        let mut lo = [0usize; 2];
        let mut hi = [0usize; 2];
        for a in 0..self.axes {
            lo[a] = self.axis_cell(a, c[a] - reach);
            hi[a] = self.axis_cell(a, c[a] + reach);
        }
        let mut out = Vec::new();
        let (y_lo, y_hi) = if self.axes == 2 { (lo[1], hi[1]) } else { (0, 0) };
        for y in y_lo..=y_hi {
            for x in lo[0]..=hi[0] {
                let cell = y * self.cells + x;
                for &w in &self.members[self.starts[cell]..self.starts[cell + 1]] {
                    if is_edge(emb, model, v, w) {
                        out.push(w);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}
