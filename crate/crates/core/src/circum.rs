//! Circumradius of a finite point set with respect to a symmetric polytope,
//! and certificates of optimal containment.
//!
//! `R(X, C)` is the least `λ >= 0` such that `t + X ⊆ λ C` for some
//! translation `t`. Containment is written against the vertex description:
//! `t + p_j = Σ_k w_jk v_k` with `w_jk >= 0` and `Σ_k w_jk = λ` for each
//! point `p_j`, where `v_k` runs over the signed generators. This is linear in
//! `(t, λ, w)` and needs no facet enumeration, so 3D bodies are handled the
//! same way as planar ones.
//!
//! An optimal containment is certified by touching points `q_i` on the
//! boundary of `R·C` with outer normals `u_i` such that `0 ∈ conv{u_i}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{SymmetricPolytope, Vector};
use crate::linprog::{LinearProgram, LpStatus, SolverOptions};

/// Relative threshold below the radius at which a point counts as touching.
pub const CONTACT_TOL: f64 = 1e-7;
/// Absolute tolerance used by [`verify_certificate`].
pub const CERTIFICATE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contact {
    pub index: usize,
    pub gauge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircumResult {
    pub radius: f64,
    /// Translation `t` with `t + X ⊆ radius · C`.
    pub center: Vector,
    pub contacts: Vec<Contact>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityCertificate {
    /// Index into `X` of each touching point.
    pub point_indices: Vec<usize>,
    /// `center + X[i]`, on the boundary of `radius · C`.
    pub touching_points: Vec<Vector>,
    /// Unit outer normals of `radius · C` at the touching points.
    pub normals: Vec<Vector>,
    pub weights: Vec<f64>,
}

fn check_dims(points: &[Vector], body: &SymmetricPolytope) -> Result<()> {
    if points.is_empty() {
        return Err(Error::InvalidInput("circumradius of the empty set is not defined".into()));
    }
    match points.iter().find(|p| p.dim() != body.dim()) {
        Some(p) => Err(Error::DimensionMismatch { expected: body.dim(), got: p.dim() }),
        None => Ok(()),
    }
}

/// Solves the containment LP and returns `(radius, translation)`.
fn containment_lp(points: &[Vector], body: &SymmetricPolytope, opts: &SolverOptions) -> Result<(f64, Vector)> {
    check_dims(points, body)?;
    let d = body.dim();
    if points.len() == 1 {
        return Ok((0.0, -&points[0]));
    }
    let vertices: Vec<Vector> = body.signed_vertices().collect();
    let nv = vertices.len();
    let lambda = d;
    let weight = |j: usize, k: usize| d + 1 + j * nv + k;
    let mut lp = LinearProgram::new(d + 1 + points.len() * nv);
    for axis in 0..d {
        lp.set_free(axis);
    }
    lp.set_cost(lambda, 1.0);
    let mut entries = Vec::with_capacity(nv + 1);
    for (j, p) in points.iter().enumerate() {
        for axis in 0..d {
            entries.clear();
            entries.push((axis, 1.0));
            entries.extend(vertices.iter().enumerate().map(|(k, v)| (weight(j, k), -v[axis])));
            lp.add_equality_sparse(&entries, -p[axis])?;
        }
        entries.clear();
        entries.push((lambda, -1.0));
        entries.extend((0..nv).map(|k| (weight(j, k), 1.0)));
        lp.add_equality_sparse(&entries, 0.0)?;
    }
    let sol = lp.solve_with(opts)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure(format!("containment LP returned {:?}", sol.status)));
    }
    let center = Vector::new(sol.primal[..d].to_vec());
    Ok((sol.primal[lambda].max(0.0), center))
}

/// `R(X, C)` only, without contact detection.
pub fn circumradius_value(points: &[Vector], body: &SymmetricPolytope) -> Result<f64> {
    containment_lp(points, body, &SolverOptions::default()).map(|(r, _)| r)
}

/// `R(X, C)` solved with explicit solver settings.
pub fn circumradius_value_with(points: &[Vector], body: &SymmetricPolytope, opts: &SolverOptions) -> Result<f64> {
    containment_lp(points, body, opts).map(|(r, _)| r)
}

/// Circumradius, an optimal translation, and the points touching the boundary.
pub fn circumradius(points: &[Vector], body: &SymmetricPolytope) -> Result<CircumResult> {
    let (radius, center) = containment_lp(points, body, &SolverOptions::default())?;
    let mut contacts = Vec::new();
    for (index, p) in points.iter().enumerate() {
        let g = body.gauge(&(&center + p))?;
        if g >= radius * (1.0 - CONTACT_TOL) {
            contacts.push(Contact { index, gauge: g });
        }
    }
    Ok(CircumResult { radius, center, contacts })
}

/// Extracts an optimal-containment certificate from a circumradius result.
///
/// A joint LP picks `v_i` in the normal cone at each contact `q_i` with
/// `Σ v_i = 0` and `Σ <v_i, q_i> = 1`; a second LP over convex weights of the
/// normalized `v_i` returns a basic solution, which has at most `dim + 1`
/// nonzero weights.
pub fn certificate(
    points: &[Vector],
    body: &SymmetricPolytope,
    result: &CircumResult,
) -> Result<OptimalityCertificate> {
    check_dims(points, body)?;
    if result.radius <= 0.0 || result.contacts.len() < 2 {
        return Err(Error::CertificateNotFound(format!(
            "need a positive radius and at least two contacts (radius {}, {} contacts)",
            result.radius,
            result.contacts.len()
        )));
    }
    let d = body.dim();
    let radius = result.radius;
    let touching: Vec<(usize, Vector)> = result
        .contacts
        .iter()
        .map(|c| {
            let q = &result.center + &points[c.index];
            // Snap onto the boundary of radius·C so normal cones are nonempty.
            let q = if c.gauge > 0.0 { q.scale(radius / c.gauge) } else { q };
            (c.index, q)
        })
        .collect();
    let vertices: Vec<Vector> = body.signed_vertices().map(|v| v.scale(radius)).collect();
    let nc = touching.len();
    let nv = vertices.len();

    let normal = |i: usize, axis: usize| i * d + axis;
    let slack = |i: usize, k: usize| nc * d + i * nv + k;
    let mut lp = LinearProgram::new(nc * d + nc * nv);
    for var in 0..nc * d {
        lp.set_free(var);
    }
    let mut entries = Vec::new();
    for (i, (_, q)) in touching.iter().enumerate() {
        for (k, y) in vertices.iter().enumerate() {
            entries.clear();
            entries.extend((0..d).map(|axis| (normal(i, axis), y[axis] - q[axis])));
            entries.push((slack(i, k), 1.0));
            lp.add_equality_sparse(&entries, 0.0)?;
        }
    }
    for axis in 0..d {
        entries.clear();
        entries.extend((0..nc).map(|i| (normal(i, axis), 1.0)));
        lp.add_equality_sparse(&entries, 0.0)?;
    }
    entries.clear();
    for (i, (_, q)) in touching.iter().enumerate() {
        entries.extend((0..d).map(|axis| (normal(i, axis), q[axis])));
    }
    lp.add_equality_sparse(&entries, 1.0)?;
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::CertificateNotFound(format!("normal-cone LP returned {:?}", sol.status)));
    }

    let raw: Vec<Vector> = (0..nc).map(|i| Vector::new(sol.primal[i * d..(i + 1) * d].to_vec())).collect();
    let largest = raw.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let candidates: Vec<usize> = (0..nc).filter(|&i| raw[i].norm() > 1e-12 * largest).collect();
    let units: Vec<Vector> = candidates.iter().map(|&i| raw[i].scale(1.0 / raw[i].norm())).collect();

    // Carathéodory reduction: basic solutions of this LP have <= d + 1 nonzeros.
    let mut wlp = LinearProgram::new(candidates.len());
    for axis in 0..d {
        wlp.add_equality(units.iter().map(|u| u[axis]).collect(), 0.0)?;
    }
    wlp.add_equality(vec![1.0; candidates.len()], 1.0)?;
    let wsol = wlp.solve()?;
    if wsol.status != LpStatus::Optimal {
        return Err(Error::CertificateNotFound(format!("weight LP returned {:?}", wsol.status)));
    }

    let mut cert = OptimalityCertificate {
        point_indices: Vec::new(),
        touching_points: Vec::new(),
        normals: Vec::new(),
        weights: Vec::new(),
    };
    for (slot, &i) in candidates.iter().enumerate() {
        let w = wsol.primal[slot];
        if w > 1e-13 {
            cert.point_indices.push(touching[i].0);
            cert.touching_points.push(&result.center + &points[touching[i].0]);
            cert.normals.push(units[slot].clone());
            cert.weights.push(w);
        }
    }
    let total: f64 = cert.weights.iter().sum();
    for w in &mut cert.weights {
        *w /= total;
    }
    if !verify_certificate(&cert, points, body, radius) {
        return Err(Error::CertificateNotFound("extracted certificate failed verification".into()));
    }
    Ok(cert)
}

/// Checks every condition of an optimal-containment certificate.
pub fn verify_certificate(
    cert: &OptimalityCertificate,
    points: &[Vector],
    body: &SymmetricPolytope,
    radius: f64,
) -> bool {
    let d = body.dim();
    let m = cert.weights.len();
    if radius <= 0.0
        || m < 2
        || m > d + 1
        || cert.normals.len() != m
        || cert.touching_points.len() != m
        || cert.point_indices.len() != m
    {
        return false;
    }
    if cert.point_indices.iter().any(|&i| i >= points.len())
        || cert.normals.iter().chain(&cert.touching_points).any(|v| v.dim() != d)
    {
        return false;
    }
    if cert.weights.iter().any(|&w| w.is_nan() || w < 0.0) || (cert.weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return false;
    }
    let tol = CERTIFICATE_TOL;
    let mut mix = Vector::zeros(d);
    for (u, &w) in cert.normals.iter().zip(&cert.weights) {
        if (u.norm() - 1.0).abs() > 1e-6 {
            return false;
        }
        mix = &mix + &u.scale(w);
    }
    if mix.max_abs() > tol {
        return false;
    }
    // All touching points must come from one common translate of X.
    let shift = &cert.touching_points[0] - &points[cert.point_indices[0]];
    let scale = 1.0 + radius * body.scale_hint();
    for (q, &i) in cert.touching_points.iter().zip(&cert.point_indices) {
        if !(q - &points[i]).approx_eq(&shift, tol * scale) {
            return false;
        }
    }
    let vertices: Vec<Vector> = body.signed_vertices().map(|v| v.scale(radius)).collect();
    for (q, u) in cert.touching_points.iter().zip(&cert.normals) {
        match body.gauge(q) {
            Ok(g) if (g - radius).abs() <= tol * radius.max(1.0) => {}
            _ => return false,
        }
        if vertices.iter().any(|y| u.dot(&(y - q)) > tol * scale) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vector {
        Vector::from([x, y])
    }

    fn square() -> SymmetricPolytope {
        SymmetricPolytope::new(vec![v(1.0, 1.0), v(1.0, -1.0)]).unwrap()
    }

    fn regular_hexagon() -> SymmetricPolytope {
        let r = 3f64.sqrt();
        SymmetricPolytope::new(vec![v(r / 2.0, 0.0), v(r / 4.0, 0.75), v(r / 4.0, -0.75)]).unwrap()
    }

    fn reference_triangle() -> Vec<Vector> {
        let r = 3f64.sqrt();
        vec![v(-r / 2.0, -0.5), v(r / 2.0, -0.5), v(0.0, 1.0)]
    }

    #[test]
    fn single_point_has_zero_radius() {
        let res = circumradius(&[v(3.0, 4.0)], &square()).unwrap();
        assert_eq!(res.radius, 0.0);
        assert_eq!(res.center, v(-3.0, -4.0));
    }

    #[test]
    fn empty_set_rejected() {
        assert!(matches!(circumradius(&[], &square()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            circumradius(&[Vector::from([1.0, 0.0, 0.0])], &square()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn segment_in_square() {
        let x = [v(-1.0, 0.0), v(1.0, 0.0)];
        let res = circumradius(&x, &square()).unwrap();
        assert!((res.radius - 1.0).abs() < 1e-12);
        assert_eq!(res.contacts.len(), 2);
        let cert = certificate(&x, &square(), &res).unwrap();
        assert_eq!(cert.weights.len(), 2);
        for (u, w) in cert.normals.iter().zip(&cert.weights) {
            assert!((w - 0.5).abs() < 1e-9);
            assert!((u[0].abs() - 1.0).abs() < 1e-9 && u[1].abs() < 1e-9);
        }
        assert!((cert.normals[0][0] + cert.normals[1][0]).abs() < 1e-9);
    }

    #[test]
    fn reference_triangle_in_regular_hexagon() {
        // The triangle's vertices point at edge midpoints; the hexagon's
        // inradius is 3/4 and the triangle's circumradius is 1.
        let x = reference_triangle();
        let c = regular_hexagon();
        let res = circumradius(&x, &c).unwrap();
        assert!((res.radius - 4.0 / 3.0).abs() < 1e-10, "{}", res.radius);
        assert_eq!(res.contacts.len(), 3);
        let cert = certificate(&x, &c, &res).unwrap();
        assert_eq!(cert.weights.len(), 3);
        for w in &cert.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn triangle_in_fine_polygon_approximates_circle() {
        let n = 64;
        let gens: Vec<Vector> = (0..n / 2)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                v(a.cos(), a.sin())
            })
            .collect();
        let c = SymmetricPolytope::new(gens).unwrap();
        let r = circumradius_value(&reference_triangle(), &c).unwrap();
        assert!((r - 1.0).abs() <= 0.01, "{r}");
    }

    #[test]
    fn corrupted_certificates_rejected() {
        let x = reference_triangle();
        let c = regular_hexagon();
        let res = circumradius(&x, &c).unwrap();
        let cert = certificate(&x, &c, &res).unwrap();
        assert!(verify_certificate(&cert, &x, &c, res.radius));

        let mut neg = cert.clone();
        neg.weights[0] = -neg.weights[0];
        assert!(!verify_certificate(&neg, &x, &c, res.radius));

        let mut bent = cert.clone();
        for u in &mut bent.normals {
            *u = Vector::from([u[0] + 1e-3, u[1] - 1e-3]);
        }
        assert!(!verify_certificate(&bent, &x, &c, res.radius));

        assert!(!verify_certificate(&cert, &x, &c, res.radius * 1.01));
    }
}
