use dancar::analytic::PoincarePoint;
use dancar::graph::transitive_closure;
use dancar::{DancarEmbedding, DirectedGraph, Edge};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_embedding(rng: &mut ChaCha8Rng, n: usize, k: usize) -> DancarEmbedding {
    let anchors = (0..n * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let centers = (0..n * k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let radii = (0..n).map(|_| rng.gen_range(0.05..1.2)).collect();
    DancarEmbedding::from_parts(k, anchors, centers, radii).unwrap()
}

/// Each ordered pair `v != w` is an edge with probability `p`.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for v in 0..n {
        for w in 0..n {
            if v != w && rng.gen_bool(p) {
                edges.push((v, w));
            }
        }
    }
    DirectedGraph::from_edges(n, edges)
}

/// Transitive closure of a random DAG with edges `i -> j` (`i < j`) kept
/// with probability `p`.
pub fn random_dag_closure(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    transitive_closure(&DirectedGraph::from_edges(n, edges)).unwrap()
}

pub fn cycle(n: usize) -> DirectedGraph {
    DirectedGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Perfect `arity`-ary out-tree, nodes numbered breadth-first from root 0.
pub fn perfect_tree(arity: usize, depth: usize) -> DirectedGraph {
    let mut edges = Vec::new();
    let mut frontier = vec![0];
    let mut next = 1;
    for _ in 0..depth {
        let mut level = Vec::new();
        for &p in &frontier {
            for _ in 0..arity {
                edges.push((p, next));
                level.push(next);
                next += 1;
            }
        }
        frontier = level;
    }
    DirectedGraph::from_edges(next, edges)
}

/// Point with norm below `max_norm`, direction and radius spread uniformly
/// over the ball volume.
pub fn random_ball_point(rng: &mut ChaCha8Rng, k: usize, max_norm: f64) -> PoincarePoint {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 && norm <= 1.0 {
            let target = max_norm * rng.gen::<f64>().powf(1.0 / k as f64);
            return PoincarePoint::new(v.iter().map(|x| x * target / norm).collect()).unwrap();
        }
    }
}

pub fn complement(g: &DirectedGraph) -> Vec<Edge> {
    let n = g.node_count();
    (0..n)
        .flat_map(|v| (0..n).map(move |w| (v, w)))
        .filter(|&(v, w)| v != w && !g.has_edge(v, w))
        .collect()
}

/// Orthogonal matrix from Gram-Schmidt on random rows.
pub fn random_rotation(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while basis.len() < k {
        let mut v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    basis
}

/// Applies `p -> R p + shift` to every anchor and center.
pub fn rigid_motion(emb: &DancarEmbedding, rot: &[Vec<f64>], shift: &[f64]) -> DancarEmbedding {
    let k = emb.dim();
    let apply = |points: &[f64]| -> Vec<f64> {
        points
            .chunks(k)
            .flat_map(|p| {
                rot.iter()
                    .zip(shift)
                    .map(move |(row, s)| row.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() + s)
            })
            .collect()
    };
    DancarEmbedding::from_parts(
        k,
        apply(emb.anchors()),
        apply(emb.centers()),
        emb.radii().to_vec(),
    )
    .unwrap()
}

pub fn scaled(emb: &DancarEmbedding, s: f64) -> DancarEmbedding {
    let mul = |xs: &[f64]| xs.iter().map(|x| x * s).collect();
    DancarEmbedding::from_parts(
        emb.dim(),
        mul(emb.anchors()),
        mul(emb.centers()),
        mul(emb.radii()),
    )
    .unwrap()
}

pub fn check(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}
