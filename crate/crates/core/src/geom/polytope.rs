use serde::{Deserialize, Serialize};

use super::polygon::{hull2d, Polygon2};
use super::vector::{rank, Vector};
use super::EPS;
use crate::error::{Error, Result};
use crate::linprog::{LinearProgram, LpStatus};

/// A centrally symmetric convex body `conv(±g_1, ..., ±g_m)`.
///
/// Only one representative of each `±g` pair is stored; consumers expand the
/// signs through [`SymmetricPolytope::signed_vertices`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricPolytope {
    dim: usize,
    generators: Vec<Vector>,
}

/// JSON carrier: `{"dim": n, "generators": [[...], ...]}` with signs implicit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopeJson {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
}

impl SymmetricPolytope {
    pub fn new(generators: Vec<Vector>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::DegenerateBody("no generators".into()));
        };
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::DegenerateBody("zero-dimensional generators".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: g.dim() });
        }
        if generators.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidInput("non-finite generator coordinate".into()));
        }
        let scale = generators.iter().fold(0.0_f64, |m, g| m.max(g.max_abs()));
        let tol = EPS * scale;
        let mut kept: Vec<Vector> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.max_abs() <= tol {
                return Err(Error::DegenerateBody("zero generator".into()));
            }
            let neg = -&g;
            if kept.iter().any(|k| k.approx_eq(&g, tol) || k.approx_eq(&neg, tol)) {
                continue;
            }
            kept.push(g);
        }
        if rank(&kept, tol) < dim {
            return Err(Error::DegenerateBody(format!("generators span fewer than {dim} dimensions")));
        }
        Ok(Self { dim, generators: kept })
    }

    /// The symmetric body whose vertices are those of `polygon`; the polygon
    /// is assumed to be symmetric about the origin.
    pub fn from_polygon(polygon: &Polygon2) -> Result<Self> {
        Self::new(polygon.vertices().to_vec())
    }

    pub fn from_json(json: &PolytopeJson) -> Result<Self> {
        let body = Self::new(json.generators.iter().cloned().map(Vector::new).collect())?;
        if body.dim != json.dim {
            return Err(Error::DimensionMismatch { expected: json.dim, got: body.dim });
        }
        Ok(body)
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson { dim: self.dim, generators: self.generators.iter().map(|g| g.coords().to_vec()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vector] {
        &self.generators
    }

    /// `g_1, -g_1, g_2, -g_2, ...`
    pub fn signed_vertices(&self) -> impl Iterator<Item = Vector> + '_ {
        self.generators.iter().flat_map(|g| [g.clone(), -g])
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.generators.iter().map(|g| g.scale(t)).collect())
    }

    /// Image under a map that is assumed linear (so symmetry is preserved).
    pub fn map(&self, f: impl Fn(&Vector) -> Vector) -> Result<Self> {
        Self::new(self.generators.iter().map(f).collect())
    }

    /// Planar bodies as an explicit counterclockwise polygon.
    pub fn to_polygon(&self) -> Result<Polygon2> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim });
        }
        hull2d(&self.signed_vertices().collect::<Vec<_>>())
    }

    /// Largest Euclidean norm of a generator.
    pub fn scale_hint(&self) -> f64 {
        self.generators.iter().fold(0.0, |m, g| m.max(g.norm()))
    }

    /// The gauge (norm with unit ball `self`) of `x`: the smallest `λ >= 0`
    /// with `x ∈ λ C`, solved as a minimum-weight conic combination of the
    /// signed generators.
    pub fn gauge(&self, x: &Vector) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        if x.coords().iter().all(|&c| c == 0.0) {
            return Ok(0.0);
        }
        let cols = 2 * self.generators.len();
        let mut lp = LinearProgram::new(cols);
        for k in 0..cols {
            lp.set_cost(k, 1.0);
        }
        for axis in 0..self.dim {
            let row: Vec<f64> = self.signed_vertices().map(|v| v[axis]).collect();
            lp.add_equality(row, x[axis])?;
        }
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.objective),
            status => Err(Error::NumericalFailure(format!("gauge LP returned {status:?}"))),
        }
    }

    /// Membership `x ∈ C` with relative slack `tol`.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.gauge(x)? <= 1.0 + tol)
    }

    /// Containment of another body, tested on its vertices.
    pub fn contains_body(&self, other: &SymmetricPolytope, tol: f64) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The gauge of `x` with respect to `body`.
pub fn gauge(body: &SymmetricPolytope, x: &Vector) -> Result<f64> {
    body.gauge(x)
}
