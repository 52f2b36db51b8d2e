//! The disk-anchor embedding and its containment scores.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::NodeId;

/// Lower bound enforced on every radius after each optimizer step.
pub const MIN_RADIUS: f64 = 1e-6;

/// Per node: an anchor point `x_v`, a disk center `c_v` and radius `r_v` in
/// `R^dim`. Coordinates are stored row-major, `dim` values per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DancarEmbedding {
    dim: usize,
    anchors: Vec<f64>,
    centers: Vec<f64>,
    radii: Vec<f64>,
}

impl DancarEmbedding {
    /// All-zero coordinates with unit radii.
    pub fn zeros(node_count: usize, dim: usize) -> Self {
        assert!(dim >= 1, "embedding dimension must be at least 1");
        Self {
            dim,
            anchors: vec![0.0; node_count * dim],
            centers: vec![0.0; node_count * dim],
            radii: vec![1.0; node_count],
        }
    }

    pub fn from_parts(dim: usize, anchors: Vec<f64>, centers: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Contract("embedding dimension must be at least 1".into()));
        }
        let n = radii.len();
        if anchors.len() != n * dim || centers.len() != n * dim {
            return Err(Error::Contract(format!(
                "coordinate arrays must hold {n} x {dim} values"
            )));
        }
        let emb = Self {
            dim,
            anchors,
            centers,
            radii,
        };
        emb.validate()?;
        Ok(emb)
    }

    /// Checks that every value is finite and every radius positive.
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&self.anchors) || !finite(&self.centers) || !finite(&self.radii) {
            return Err(Error::Contract("embedding contains non-finite values".into()));
        }
        if let Some(v) = self.radii.iter().position(|&r| r <= 0.0) {
            return Err(Error::Contract(format!("radius of node {v} is not positive")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node_count(&self) -> usize {
        self.radii.len()
    }

    pub fn anchor(&self, v: NodeId) -> &[f64] {
        &self.anchors[v * self.dim..(v + 1) * self.dim]
    }

    pub fn center(&self, v: NodeId) -> &[f64] {
        &self.centers[v * self.dim..(v + 1) * self.dim]
    }

    pub fn radius(&self, v: NodeId) -> f64 {
        self.radii[v]
    }

    pub fn anchor_mut(&mut self, v: NodeId) -> &mut [f64] {
        &mut self.anchors[v * self.dim..(v + 1) * self.dim]
    }

    pub fn center_mut(&mut self, v: NodeId) -> &mut [f64] {
        &mut self.centers[v * self.dim..(v + 1) * self.dim]
    }

    pub fn set_radius(&mut self, v: NodeId, r: f64) {
        self.radii[v] = r;
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Mutable views of the three parameter blocks, in the order
    /// anchors, centers, radii.
    pub fn blocks_mut(&mut self) -> [&mut [f64]; 3] {
        [&mut self.anchors, &mut self.centers, &mut self.radii]
    }

    pub fn clamp_radii(&mut self, min: f64) {
        for r in &mut self.radii {
            if *r < min {
                *r = min;
            }
        }
    }

    /// Signed containment margin of `w`'s anchor in `v`'s disk:
    /// `|c_v - x_w| - r_v`. Non-positive means the edge `v -> w` is present.
    pub fn score(&self, v: NodeId, w: NodeId) -> Result<f64> {
        if v == w {
            return Err(Error::Contract(format!("score of self pair ({v}, {v})")));
        }
        Ok(self.containment_margin(v, w))
    }

    /// Disk-embedding score `|c_u - c_v| + r_u - r_v`; non-positive iff
    /// disk `u` lies inside disk `v`. Anchors are ignored.
    pub fn disk_embedding_score(&self, u: NodeId, v: NodeId) -> Result<f64> {
        if u == v {
            return Err(Error::Contract(format!("score of self pair ({u}, {u})")));
        }
        Ok(self.disk_margin(u, v))
    }

    #[inline]
    pub(crate) fn containment_margin(&self, v: NodeId, w: NodeId) -> f64 {
        distance(self.center(v), self.anchor(w)) - self.radii[v]
    }

    #[inline]
    pub(crate) fn disk_margin(&self, u: NodeId, v: NodeId) -> f64 {
        distance(self.center(u), self.center(v)) + self.radii[u] - self.radii[v]
    }

    /// Signed margin under the given reconstruction rule.
    #[inline]
    pub fn margin(&self, model: Model, v: NodeId, w: NodeId) -> f64 {
        match model {
            Model::Dancar => self.containment_margin(v, w),
            Model::Disk => self.disk_margin(v, w),
        }
    }
}

/// Which reconstruction rule an embedding is read with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Model {
    /// Edge `v -> w` iff anchor `x_w` lies in disk `D(c_v, r_v)`.
    #[default]
    Dancar,
    /// Baseline: edge `u -> v` iff disk `u` lies inside disk `v`.
    Disk,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dancar" => Ok(Self::Dancar),
            "disk" => Ok(Self::Disk),
            other => Err(Error::Config {
                key: "baseline".into(),
                message: format!("expected dancar|disk, got `{other}`"),
            }),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Dancar => "dancar",
            Self::Disk => "disk",
        })
    }
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}
