use crate::embedding::{squared_distance, DancarEmbedding};
use crate::error::{Error, Result};

/// A point of the open unit ball.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincarePoint(Vec<f64>);

impl PoincarePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("point has no coordinates".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let norm_sq: f64 = coords.iter().map(|c| c * c).sum();
        if norm_sq >= 1.0 {
            return Err(Error::Domain(format!(
                "norm {} is outside the open unit ball",
                norm_sq.sqrt()
            )));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }
}

/// Hyperbolic distance `arcosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2)))`.
pub fn poincare_distance(x: &PoincarePoint, y: &PoincarePoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::Domain(format!(
            "dimension mismatch: {} vs {}",
            x.dim(),
            y.dim()
        )));
    }
    let num = squared_distance(&x.0, &y.0);
    let den = (1.0 - x.norm_sq()) * (1.0 - y.norm_sq());
    Ok((1.0 + 2.0 * num / den).acosh())
}

/// The Euclidean ball equal, as a point set, to the closed hyperbolic ball of
/// radius `r` around `a`. Returns `(center, radius)`.
pub fn poincare_ball_to_euclidean(a: &PoincarePoint, r: f64) -> Result<(Vec<f64>, f64)> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Domain(format!(
            "hyperbolic radius must be positive, got {r}"
        )));
    }
    let a_sq = a.norm_sq();
    // (cosh r - 1) / 2 == sinh(r/2)^2, without cancellation for small r.
    let half = (0.5 * r).sinh();
    let k = half * half * (1.0 - a_sq);
    let center = a.0.iter().map(|c| c / (k + 1.0)).collect();
    let radius = (k / (k + 1.0) * (1.0 - a_sq / (k + 1.0))).sqrt();
    Ok((center, radius))
}

/// DANCAR embedding of the hyperbolic threshold graph: anchors at the points,
/// disks equal to the hyperbolic balls of radius `eps` around them.
pub fn import_poincare(points: &[PoincarePoint], eps: f64) -> Result<DancarEmbedding> {
    let Some(first) = points.first() else {
        return DancarEmbedding::from_parts(1, Vec::new(), Vec::new(), Vec::new());
    };
    let dim = first.dim();
    let mut anchors = Vec::with_capacity(points.len() * dim);
    let mut centers = Vec::with_capacity(points.len() * dim);
    let mut radii = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::Domain(format!(
                "point {i} has dimension {}, expected {dim}",
                p.dim()
            )));
        }
        let (c, r) = poincare_ball_to_euclidean(p, eps)?;
        anchors.extend_from_slice(p.coords());
        centers.extend(c);
        radii.push(r);
    }
    DancarEmbedding::from_parts(dim, anchors, centers, radii)
}
