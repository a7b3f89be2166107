//! Vectors, planar hulls, symmetric polytopes and their gauges.

mod polygon;
mod polytope;
mod vector;

pub use polygon::{hull2d, minkowski_interpolate, Polygon2};
pub use polytope::{gauge, PolytopeJson, SymmetricPolytope};
pub use vector::{rank, Vector};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for geometric predicates on unit-scale data.
pub const EPS: f64 = 1e-9;

/// JSON carrier: `{"dim": n, "points": [[...], ...], "labels": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointSetJson {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl PointSetJson {
    /// Points checked against `dim`, with labels `p1, p2, ...` when absent.
    pub fn into_points(self) -> Result<(Vec<Vector>, Vec<String>)> {
        let points: Vec<Vector> = self.points.into_iter().map(Vector::new).collect();
        if let Some(p) = points.iter().find(|p| p.dim() != self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        let labels = match self.labels {
            Some(labels) if labels.len() != points.len() => {
                return Err(Error::InvalidInput(format!("{} labels for {} points", labels.len(), points.len())))
            }
            Some(labels) => labels,
            None => (1..=points.len()).map(|i| format!("p{i}")).collect(),
        };
        Ok((points, labels))
    }
}
