use super::vector::Vector;
use super::EPS;
use crate::error::{Error, Result};

/// A convex polygon with vertices in counterclockwise order, no three
/// consecutive vertices collinear, and the first vertex not repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon2 {
    vertices: Vec<Vector>,
}

fn cross(o: &Vector, a: &Vector, b: &Vector) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl Polygon2 {
    /// Validates strict convexity and orientation of an explicit vertex list.
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateInput(format!("polygon needs at least 3 vertices, got {}", vertices.len())));
        }
        if let Some(v) = vertices.iter().find(|v| v.dim() != 2) {
            return Err(Error::DimensionMismatch { expected: 2, got: v.dim() });
        }
        let n = vertices.len();
        let tol = cross_tolerance(&vertices);
        for i in 0..n {
            let c = cross(&vertices[i], &vertices[(i + 1) % n], &vertices[(i + 2) % n]);
            if c <= tol {
                return Err(Error::DegenerateInput(format!(
                    "vertices {i}..{} are not in strictly convex counterclockwise position",
                    i + 2
                )));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let origin = &self.vertices[0];
        (1..n - 1).map(|i| cross(origin, &self.vertices[i], &self.vertices[i + 1])).sum::<f64>() / 2.0
    }

    pub fn scaled(&self, t: f64) -> Result<Polygon2> {
        hull2d(&self.vertices.iter().map(|v| v.scale(t)).collect::<Vec<_>>())
    }

    /// Same polygon up to vertex rotation, within `tol` per coordinate.
    pub fn approx_eq(&self, other: &Polygon2, tol: f64) -> bool {
        let n = self.len();
        if n != other.len() {
            return false;
        }
        (0..n).any(|shift| (0..n).all(|i| self.vertices[i].approx_eq(&other.vertices[(i + shift) % n], tol)))
    }
}

fn cross_tolerance(points: &[Vector]) -> f64 {
    let scale = points.iter().fold(0.0_f64, |m, p| m.max(p.max_abs()));
    EPS * scale * scale
}

/// Convex hull by Andrew's monotone chain. Collinear points on hull edges are
/// dropped; the result starts at the lexicographically smallest vertex.
pub fn hull2d(points: &[Vector]) -> Result<Polygon2> {
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, got: p.dim() });
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite coordinate".into()));
    }
    let scale = points.iter().fold(0.0_f64, |m, p| m.max(p.max_abs()));
    let dedup_tol = EPS * scale.max(f64::MIN_POSITIVE);
    let cross_tol = EPS * scale * scale;

    let mut pts: Vec<Vector> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup_by(|a, b| a.approx_eq(b, dedup_tol));
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 distinct points, got {}", pts.len())));
    }

    let mut lower: Vec<Vector> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= cross_tol {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= cross_tol {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateInput("all points are collinear".into()));
    }
    Ok(Polygon2 { vertices: lower })
}

/// The Minkowski combination `(1 - s) A + s B` as the hull of all pairwise
/// combinations of vertices.
pub fn minkowski_interpolate(a: &Polygon2, b: &Polygon2, s: f64) -> Result<Polygon2> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidInput(format!("interpolation parameter {s} outside [0, 1]")));
    }
    let sums: Vec<Vector> = a.vertices.iter().flat_map(|p| b.vertices.iter().map(move |q| p.lerp(q, s))).collect();
    hull2d(&sums)
}
