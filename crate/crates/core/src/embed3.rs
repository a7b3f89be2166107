//! Banach-embeddability of three-point diversities.
//!
//! Everything is phrased on the reference triangle `p1, p2, p3` (equilateral,
//! circumradius 1, centered at the origin). A canonical diversity has its
//! labels permuted so that `d13 <= d12`; the permutation is kept so that
//! witnesses can be mapped back to the caller's labels.
//!
//! The largest attainable `d123` for given pairwise values is
//! `4·d12·d13·d23 / f` with `f = 2(d12 d13 + d12 d23 + d13 d23) - d12² - d13² - d23²`,
//! which is the circumradius of the reference triangle in the hexagon
//! spanned by the six forced boundary points. The expression
//! `8·d12·d13·d23 / (√3 f)` that appears in the literature overstates it by
//! `2/√3` (the placed triangle there has side `2λ`, not `√3 λ`); it is kept as
//! [`printed_banach_upper`] for reporting only.

use rand::Rng;
use serde::Serialize;

use crate::circum::circumradius_value;
use crate::diversity::{check_axioms, DiversityTable};
use crate::error::{Error, Result};
use crate::geom::{hull2d, minkowski_interpolate, Polygon2, SymmetricPolytope, Vector};
use crate::sampling;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Relative decision slack: closed inequalities are accepted within
/// `DECISION_SLACK * (1 + max input)`.
pub const DECISION_SLACK: f64 = 1e-9;
/// Iteration cap for the witness bisection.
pub const MAX_BISECTION_STEPS: usize = 200;
/// Largest accepted gap `|R(S, C) - target|` for a witness.
pub const WITNESS_TOL: f64 = 1e-6;
/// Slack for the dimension-three probe.
pub const PROBE_TOL: f64 = 1e-7;

pub fn reference_triangle() -> [Vector; 3] {
    [Vector::from([-SQRT3 / 2.0, -0.5]), Vector::from([SQRT3 / 2.0, -0.5]), Vector::from([0.0, 1.0])]
}

fn decision_slack(values: &[f64]) -> f64 {
    scaled_slack(DECISION_SLACK, values)
}

fn scaled_slack(relative: f64, values: &[f64]) -> f64 {
    relative * (1.0 + values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// Unordered pair index of `{i, j}` in `[12, 13, 23]` order.
fn pair_slot(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (1, 2) => 2,
        _ => unreachable!("pair of distinct indices below 3"),
    }
}

/// Pairwise values in canonical order (`r13 <= r12`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairRadii {
    pub r12: f64,
    pub r13: f64,
    pub r23: f64,
}

impl PairRadii {
    /// Canonical relabeling: the lexicographically smallest permutation of
    /// the labels with `d13 <= d12`. `perm[i]` is the original index of
    /// canonical point `i`.
    pub fn canonical(d12: f64, d13: f64, d23: f64) -> (Self, [usize; 3]) {
        let d = [d12, d13, d23];
        for perm in PERMUTATIONS {
            let r12 = d[pair_slot(perm[0], perm[1])];
            let r13 = d[pair_slot(perm[0], perm[2])];
            let r23 = d[pair_slot(perm[1], perm[2])];
            if r13 <= r12 {
                return (Self { r12, r13, r23 }, perm);
            }
        }
        unreachable!("some permutation orders two reals")
    }

    pub fn max(&self) -> f64 {
        self.r12.max(self.r13).max(self.r23)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { r12: self.r12 * t, r13: self.r13 * t, r23: self.r23 * t }
    }

    /// `2xy + 2xz + 2yz - x² - y² - z²`
    pub fn quadratic_form(&self) -> f64 {
        quadratic_form(self.r12, self.r13, self.r23)
    }

    fn slack(&self) -> f64 {
        decision_slack(&[self.r12, self.r13, self.r23])
    }
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub fn quadratic_form(x: f64, y: f64, z: f64) -> f64 {
    2.0 * x * y + 2.0 * x * z + 2.0 * y * z - x * x - y * y - z * z
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreePointDiversity {
    pub d12: f64,
    pub d13: f64,
    pub d23: f64,
    pub d123: f64,
    /// `perm[i]` is the original index of canonical point `i`.
    pub perm: [usize; 3],
}

impl ThreePointDiversity {
    /// Canonicalizes raw values; all four must be positive and finite.
    pub fn new(d12: f64, d13: f64, d23: f64, d123: f64) -> Result<Self> {
        for (name, v) in [("d12", d12), ("d13", d13), ("d23", d23), ("d123", d123)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidDiversity(format!("{name} = {v} is not a positive real")));
            }
        }
        let (pairs, perm) = PairRadii::canonical(d12, d13, d23);
        Ok(Self { d12: pairs.r12, d13: pairs.r13, d23: pairs.r23, d123, perm })
    }

    pub fn pairs(&self) -> PairRadii {
        PairRadii { r12: self.d12, r13: self.d13, r23: self.d23 }
    }

    /// Values in the caller's labeling: `[d12, d13, d23]`.
    pub fn original_pairs(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        out[pair_slot(self.perm[0], self.perm[1])] = self.d12;
        out[pair_slot(self.perm[0], self.perm[2])] = self.d13;
        out[pair_slot(self.perm[1], self.perm[2])] = self.d23;
        out
    }

    pub fn slack(&self) -> f64 {
        decision_slack(&[self.d12, self.d13, self.d23, self.d123])
    }
}

/// Canonical form of a three-point diversity table.
pub fn canonicalize(table: &DiversityTable) -> Result<ThreePointDiversity> {
    if table.size() != 3 {
        return Err(Error::NotThreePoints(table.size()));
    }
    let report = check_axioms(table);
    if !report.ok {
        let first = &report.violations[0];
        return Err(Error::InvalidDiversity(format!(
            "{:?} fails on {:?} ({} > {})",
            first.axiom, first.subsets, first.lhs, first.rhs
        )));
    }
    ThreePointDiversity::new(table.get(0b011), table.get(0b101), table.get(0b110), table.get(0b111))
}

/// `r12 - r13 <= r23 <= r12 + r13` within the decision slack.
pub fn pairwise_feasible(r: &PairRadii) -> bool {
    pairwise_failures(r).is_empty()
}

fn pairwise_failures(r: &PairRadii) -> Vec<String> {
    let eps = r.slack();
    let mut failed = Vec::new();
    if r.r12 - r.r13 > r.r23 + eps {
        failed.push("pairwise_lower".to_string());
    }
    if r.r23 > r.r12 + r.r13 + eps {
        failed.push("pairwise_upper".to_string());
    }
    failed
}

/// `[max dij, min (dij + djk)]`
pub fn minkowski_range(r: &PairRadii) -> [f64; 2] {
    let lo = r.max();
    let hi = (r.r12 + r.r13).min(r.r12 + r.r23).min(r.r13 + r.r23);
    [lo, hi]
}

/// `[max dij, 4·d12·d13·d23 / f]`
pub fn banach_range(r: &PairRadii) -> Result<[f64; 2]> {
    let f = r.quadratic_form();
    if f.is_nan() || f <= 0.0 {
        return Err(Error::DegenerateQuadratic(f));
    }
    let hi = 4.0 * r.r12 * r.r13 * r.r23 / f;
    // On the boundary of the domain hi equals max dij analytically.
    Ok([r.max(), hi.max(r.max())])
}

/// The literature's `8·d12·d13·d23 / (√3 f)`; see the module docs.
pub fn printed_banach_upper(r: &PairRadii) -> Result<f64> {
    let f = r.quadratic_form();
    if f.is_nan() || f <= 0.0 {
        return Err(Error::DegenerateQuadratic(f));
    }
    Ok(8.0 * r.r12 * r.r13 * r.r23 / (SQRT3 * f))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingDecision {
    pub canonical: ThreePointDiversity,
    pub minkowski: bool,
    pub banach: bool,
    pub minkowski_interval: [f64; 2],
    /// Absent when the pairwise values admit no Banach embedding at all.
    pub banach_interval: Option<[f64; 2]>,
    pub printed_banach_upper: Option<f64>,
    pub failed_inequalities: Vec<String>,
    pub tolerance: f64,
}

pub fn decide(d: &ThreePointDiversity) -> EmbeddingDecision {
    decide_with(d, DECISION_SLACK)
}

/// [`decide`] with a caller-chosen relative slack in place of [`DECISION_SLACK`].
pub fn decide_with(d: &ThreePointDiversity, relative_slack: f64) -> EmbeddingDecision {
    let r = d.pairs();
    let eps = scaled_slack(relative_slack, &[d.d12, d.d13, d.d23, d.d123]);
    let minkowski_interval = minkowski_range(&r);
    let mut failed = Vec::new();
    if d.d123 < minkowski_interval[0] - eps {
        failed.push("minkowski_lower".to_string());
    }
    if d.d123 > minkowski_interval[1] + eps {
        failed.push("minkowski_upper".to_string());
    }
    let minkowski = failed.is_empty();

    let pairwise = pairwise_failures(&r);
    let pairwise_ok = pairwise.is_empty();
    failed.extend(pairwise);
    let banach_interval = if pairwise_ok { banach_range(&r).ok() } else { None };
    match banach_interval {
        Some([lo, hi]) => {
            if d.d123 < lo - eps {
                failed.push("triple_lower".to_string());
            }
            if d.d123 > hi + eps {
                failed.push("triple_upper".to_string());
            }
        }
        None if pairwise_ok => failed.push("quadratic_form".to_string()),
        None => {}
    }
    let banach = minkowski && failed.is_empty();
    EmbeddingDecision {
        canonical: *d,
        minkowski,
        banach,
        minkowski_interval,
        banach_interval,
        printed_banach_upper: printed_banach_upper(&r).ok(),
        failed_inequalities: failed,
        tolerance: eps,
    }
}

/// Decision for a three-point table.
pub fn decide_banach(table: &DiversityTable) -> Result<EmbeddingDecision> {
    Ok(decide(&canonicalize(table)?))
}

/// `±a(1,0), ±(b/2)(1,√3), ±(c/2)(1,-√3)` with `a = √3/(2 r12)` etc., in that order.
pub fn boundary_points(r: &PairRadii) -> [Vector; 6] {
    let [q1, q2, q3] = boundary_representatives(r);
    [q1.clone(), -&q1, q2.clone(), -&q2, q3.clone(), -&q3]
}

fn boundary_representatives(r: &PairRadii) -> [Vector; 3] {
    let a = SQRT3 / (2.0 * r.r12);
    let b = SQRT3 / (2.0 * r.r13);
    let c = SQRT3 / (2.0 * r.r23);
    [Vector::from([a, 0.0]), Vector::from([b / 2.0, b * SQRT3 / 2.0]), Vector::from([c / 2.0, -c * SQRT3 / 2.0])]
}

/// The six boundary points in counterclockwise order.
fn hexagon_cycle(r: &PairRadii) -> [Vector; 6] {
    let [q1, q2, q3] = boundary_representatives(r);
    [q1.clone(), q2.clone(), -&q3, -&q1, -&q2, q3]
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexagonWitness {
    pub body: SymmetricPolytope,
    /// Some boundary point lies on the segment joining its neighbours, so the
    /// hexagon is really a parallelogram.
    pub degenerate: bool,
}

/// `conv` of the six boundary points: the smallest admissible body, on
/// which `R(S, ·)` attains the Banach upper bound.
pub fn hexagon_witness(r: &PairRadii) -> Result<HexagonWitness> {
    if !pairwise_feasible(r) {
        return Err(Error::PreconditionViolated(format!(
            "pairwise values {r:?} violate r12 - r13 <= r23 <= r12 + r13"
        )));
    }
    let cycle = hexagon_cycle(r);
    let scale = cycle.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
    let degenerate = (0..6).any(|i| {
        let (o, p, q) = (&cycle[(i + 5) % 6], &cycle[i], &cycle[(i + 1) % 6]);
        let turn = (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
        turn <= 1e-9 * scale * scale
    });
    let body = SymmetricPolytope::new(boundary_representatives(r).to_vec())?;
    Ok(HexagonWitness { body, degenerate })
}

/// The contact placement of the shrunken reference triangle in the hexagon.
///
/// The triangle has apex `(x0, y0)` and base vertices `(x0, y0) + λ(±1, -√3)`,
/// so its side is `2λ` and the circumradius it certifies is `√3 / (2λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlacementSolution {
    pub lambda: f64,
    pub x0: f64,
    pub y0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PlacementSolution {
    /// Placed vertices in the order of `p1, p2, p3`.
    pub fn triangle(&self) -> [Vector; 3] {
        let apex = Vector::from([self.x0, self.y0]);
        let l = self.lambda;
        [&apex + &Vector::from([-l, -SQRT3 * l]), &apex + &Vector::from([l, -SQRT3 * l]), apex]
    }

    /// `R(S, hexagon)`, i.e. the ratio of the reference side to `2λ`.
    pub fn achieved_radius(&self) -> f64 {
        SQRT3 / (2.0 * self.lambda)
    }

    /// Hexagon edges holding the three vertices, with the parameter of each
    /// vertex along its edge: `[start, end]` in the order of `triangle()`.
    pub fn contact_edges(&self) -> [[Vector; 2]; 3] {
        let (a, b, c) = (self.a, self.b, self.c);
        let q1 = Vector::from([a, 0.0]);
        let q2 = Vector::from([b / 2.0, b * SQRT3 / 2.0]);
        let q3 = Vector::from([c / 2.0, -c * SQRT3 / 2.0]);
        [[-&q1, -&q2], [q1, q3.clone()], [q2, -&q3]]
    }
}

pub fn optimal_placement(r: &PairRadii) -> Result<PlacementSolution> {
    if !pairwise_feasible(r) {
        return Err(Error::PreconditionViolated(format!(
            "pairwise values {r:?} violate r12 - r13 <= r23 <= r12 + r13"
        )));
    }
    let a = SQRT3 / (2.0 * r.r12);
    let b = SQRT3 / (2.0 * r.r13);
    let c = SQRT3 / (2.0 * r.r23);
    let [t1, t2, t3, lambda] = t_lambda(a, b, c);
    let x0 = ((a - b) * c * c + b * b * (c - a)) / (4.0 * b * c);
    let y0 = ((2.0 * SQRT3 * a * b + SQRT3 * b * b) * c - SQRT3 * a * b * b - (SQRT3 * a - SQRT3 * b) * c * c)
        / (4.0 * b * c);
    Ok(PlacementSolution { lambda, x0, y0, t1, t2, t3, a, b, c })
}

/// The apex abscissa as it is usually printed, `((a-b)c² - b²(c-a)) / (4bc)`.
/// It has the wrong sign on the second term: substituting it back puts the
/// apex off its edge unless `a = c`. [`optimal_placement`] uses the solved value.
pub fn printed_x0(a: f64, b: f64, c: f64) -> f64 {
    ((a - b) * c * c - b * b * (c - a)) / (4.0 * b * c)
}

fn t_lambda(a: f64, b: f64, c: f64) -> [f64; 4] {
    let t1 = (a * b - (a - b) * c) / (2.0 * b * c);
    let t2 = (a * b + (a - b) * c) / (2.0 * a * c);
    let t3 = (a * b + (a - b) * c) / (2.0 * a * b);
    let lambda = (2.0 * a * b * c * (a + b) - a * a * b * b - c * c * (a - b) * (a - b)) / (4.0 * a * b * c);
    [t1, t2, t3, lambda]
}

/// `t1, t2, t3 ∈ [0, 1]` and `λ >= 0` (with `1e-12` slack) for
/// `0 < a <= b` and `1/a - 1/b <= 1/c <= 1/a + 1/b`.
pub fn check_t_lambda(a: f64, b: f64, c: f64) -> Result<bool> {
    const SLACK: f64 = 1e-12;
    if !(a > 0.0 && c > 0.0 && a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::PreconditionViolated(format!("need finite positive a, c (a = {a}, c = {c})")));
    }
    if a > b * (1.0 + SLACK) {
        return Err(Error::PreconditionViolated(format!("a <= b fails ({a} > {b})")));
    }
    let (ia, ib, ic) = (1.0 / a, 1.0 / b, 1.0 / c);
    let eps = SLACK * (ia + ib + ic);
    if ia - ib > ic + eps {
        return Err(Error::PreconditionViolated(format!("1/a - 1/b <= 1/c fails ({} > {ic})", ia - ib)));
    }
    if ic > ia + ib + eps {
        return Err(Error::PreconditionViolated(format!("1/c <= 1/a + 1/b fails ({ic} > {})", ia + ib)));
    }
    let [t1, t2, t3, lambda] = t_lambda(a, b, c);
    let in_unit = |t: f64| (-SLACK..=1.0 + SLACK).contains(&t);
    Ok(in_unit(t1) && in_unit(t2) && in_unit(t3) && lambda >= -SLACK * a.max(b).max(c))
}

/// Nonnegative terms of `f(x,y,z) = (z-x+y)(x+y-z) + 4y(x-y) + 2y(z-x+y)`.
pub fn psd_terms(x: f64, y: f64, z: f64) -> [f64; 3] {
    [(z - x + y) * (x + y - z), 4.0 * y * (x - y), 2.0 * y * (z - x + y)]
}

/// `f(x,y,z)` minus its decomposition; zero for all reals.
pub fn psd_identity_residual(x: f64, y: f64, z: f64) -> f64 {
    let [p, q, r] = psd_terms(x, y, z);
    quadratic_form(x, y, z) - (p + q + r)
}

fn line_intersection(n1: &Vector, h1: f64, n2: &Vector, h2: f64) -> Vector {
    let det = n1[0] * n2[1] - n1[1] * n2[0];
    Vector::from([(h1 * n2[1] - h2 * n1[1]) / det, (n1[0] * h2 - n2[0] * h1) / det])
}

/// Parallelogram bounded by the lines of hexagon edges `i` and `j`
/// (`i, j ∈ {0, 1, 2}`) and their reflections, or `None` when the two edges
/// are parallel.
fn edge_parallelogram(cycle: &[Vector; 6], i: usize, j: usize) -> Option<Polygon2> {
    let strip = |k: usize| {
        let d = &cycle[k + 1] - &cycle[k];
        let n = Vector::from([d[1], -d[0]]);
        let h = n.dot(&cycle[k]);
        (n, h)
    };
    let (ni, hi) = strip(i);
    let (nj, hj) = strip(j);
    let det = ni[0] * nj[1] - ni[1] * nj[0];
    if det.abs() <= 1e-9 * ni.norm() * nj.norm() {
        return None;
    }
    let corners: Vec<Vector> = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .map(|&(si, sj)| line_intersection(&ni, si * hi, &nj, sj * hj))
        .collect();
    hull2d(&corners).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetWitness {
    pub body: SymmetricPolytope,
    /// Interpolation parameter between the hexagon (`0`) and the parallelogram (`1`).
    pub s: f64,
    /// Hexagon edge pair spanning the parallelogram.
    pub parallelogram: Option<[usize; 2]>,
    /// LP-measured `R(S, body)`.
    pub measured: f64,
    pub iterations: usize,
}

/// A planar body realizing the canonical pairwise values and `R(S, C) = target`
/// on the reference triangle.
///
/// The body is `(1-s)·H ⊕ s·P` for the hexagon witness `H` and a
/// parallelogram `P ⊇ H` through all six boundary points; `R(S, ·)` decreases
/// continuously from the Banach upper bound to `max dij` along the family and
/// `s` is found by bisection.
pub fn witness_for_target(r: &PairRadii, target: f64) -> Result<TargetWitness> {
    let [lo, hi] = banach_range(r)?;
    let eps = decision_slack(&[r.r12, r.r13, r.r23, target]);
    if !(target >= lo - eps && target <= hi + eps) {
        return Err(Error::TargetOutOfRange { target, lo, hi });
    }
    let hexagon = hexagon_witness(r)?;
    let tri = reference_triangle();
    let measure = |body: &SymmetricPolytope| circumradius_value(&tri, body);
    let close = |m: f64| (m - target).abs() <= 1e-10 * (1.0 + target);

    let r0 = measure(&hexagon.body)?;
    if close(r0) {
        return Ok(TargetWitness { body: hexagon.body, s: 0.0, parallelogram: None, measured: r0, iterations: 0 });
    }

    let cycle = hexagon_cycle(r);
    let mut best: Option<(f64, [usize; 2], Polygon2)> = None;
    for pair in [[0, 1], [1, 2], [0, 2]] {
        let Some(p) = edge_parallelogram(&cycle, pair[0], pair[1]) else { continue };
        let rp = measure(&SymmetricPolytope::from_polygon(&p)?)?;
        if best.as_ref().is_none_or(|(b, _, _)| rp < *b) {
            best = Some((rp, pair, p));
        }
    }
    let Some((r1, pair, parallelogram)) = best else {
        return Err(Error::DegenerateBody("no parallelogram through the boundary points".into()));
    };
    let hex_polygon = hexagon.body.to_polygon()?;
    let body_at = |s: f64| SymmetricPolytope::from_polygon(&minkowski_interpolate(&hex_polygon, &parallelogram, s)?);
    if close(r1) {
        let body = body_at(1.0)?;
        return Ok(TargetWitness { body, s: 1.0, parallelogram: Some(pair), measured: r1, iterations: 0 });
    }

    let (mut s_lo, mut s_hi) = (0.0_f64, 1.0_f64);
    let (mut best_s, mut best_gap, mut best_r) = if (r0 - target).abs() < (r1 - target).abs() {
        (0.0, (r0 - target).abs(), r0)
    } else {
        (1.0, (r1 - target).abs(), r1)
    };
    for step in 1..=MAX_BISECTION_STEPS {
        let s = 0.5 * (s_lo + s_hi);
        let rs = measure(&body_at(s)?)?;
        let gap = (rs - target).abs();
        if gap < best_gap {
            (best_s, best_gap, best_r) = (s, gap, rs);
        }
        if close(rs) || s_hi - s_lo <= f64::EPSILON {
            return finish(body_at(best_s)?, best_s, pair, best_r, step, best_gap);
        }
        if rs > target {
            s_lo = s;
        } else {
            s_hi = s;
        }
    }
    finish(body_at(best_s)?, best_s, pair, best_r, MAX_BISECTION_STEPS, best_gap)
}

fn finish(
    body: SymmetricPolytope,
    s: f64,
    pair: [usize; 2],
    measured: f64,
    iterations: usize,
    gap: f64,
) -> Result<TargetWitness> {
    if gap > WITNESS_TOL {
        return Err(Error::BisectionStalled { iterations, gap });
    }
    Ok(TargetWitness { body, s, parallelogram: Some(pair), measured, iterations })
}

/// A witness in the caller's labeling: original point `k` sits at
/// `reference_triangle()[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub points: [Vector; 3],
    pub body: SymmetricPolytope,
    pub s: f64,
    pub parallelogram: Option<[usize; 2]>,
}

/// The triangle symmetry `Q` with `Q p_i = p_perm[i]`.
fn relabeling_map(perm: [usize; 3]) -> impl Fn(&Vector) -> Vector {
    let p = reference_triangle();
    // Q = B A^{-1} with A = [p1 p2], B = [p_perm0 p_perm1].
    let (a, b) = ((&p[0], &p[1]), (&p[perm[0]], &p[perm[1]]));
    let det = a.0[0] * a.1[1] - a.1[0] * a.0[1];
    let inv = [[a.1[1] / det, -a.1[0] / det], [-a.0[1] / det, a.0[0] / det]];
    let q = [
        [b.0[0] * inv[0][0] + b.1[0] * inv[1][0], b.0[0] * inv[0][1] + b.1[0] * inv[1][1]],
        [b.0[1] * inv[0][0] + b.1[1] * inv[1][0], b.0[1] * inv[0][1] + b.1[1] * inv[1][1]],
    ];
    move |v: &Vector| Vector::from([q[0][0] * v[0] + q[0][1] * v[1], q[1][0] * v[0] + q[1][1] * v[1]])
}

/// Banach embedding of `d` on the reference triangle, or the reason there is none.
pub fn embed(d: &ThreePointDiversity) -> Result<Embedding> {
    let decision = decide(d);
    if !decision.banach {
        return Err(Error::PreconditionViolated(format!(
            "not Banach-embeddable: {}",
            decision.failed_inequalities.join(", ")
        )));
    }
    let w = witness_for_target(&d.pairs(), d.d123)?;
    let q = relabeling_map(d.perm);
    Ok(Embedding { points: reference_triangle(), body: w.body.map(&q)?, s: w.s, parallelogram: w.parallelogram })
}

/// LP-measured `(d12, d13, d23, d123)` of a triangle in a body.
pub fn measure_triangle(points: &[Vector; 3], body: &SymmetricPolytope) -> Result<[f64; 4]> {
    let pair = |i: usize, j: usize| circumradius_value(&[points[i].clone(), points[j].clone()], body);
    Ok([pair(0, 1)?, pair(0, 2)?, pair(1, 2)?, circumradius_value(points, body)?])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeViolation {
    pub trial: usize,
    pub generators: Vec<Vector>,
    pub triangle: [Vector; 3],
    pub measured: [f64; 4],
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub violations: Vec<ProbeViolation>,
    /// Largest `d123 / banach upper` seen (at most 1 when no violations).
    pub max_upper_ratio: f64,
    /// Smallest `d123 / max dij` seen (at least 1).
    pub min_lower_ratio: f64,
}

/// Inequalities violated by a measured triangle, at [`PROBE_TOL`] relative slack.
pub fn probe_failures(measured: [f64; 4]) -> Vec<String> {
    let [d12, d13, d23, d123] = measured;
    let tol = PROBE_TOL * (1.0 + d12.max(d13).max(d23).max(d123));
    let (r, _) = PairRadii::canonical(d12, d13, d23);
    let mut failed = Vec::new();
    if r.r12 - r.r13 > r.r23 + tol {
        failed.push("pairwise_lower".to_string());
    }
    if r.r23 > r.r12 + r.r13 + tol {
        failed.push("pairwise_upper".to_string());
    }
    if d123 < r.max() - tol {
        failed.push("triple_lower".to_string());
    }
    match banach_range(&r) {
        Ok([_, hi]) if d123 > hi + tol => failed.push("triple_upper".to_string()),
        Ok(_) => {}
        Err(_) => failed.push("quadratic_form".to_string()),
    }
    failed
}

/// Random symmetric polytopes in R³ (8 to 16 generator pairs) and random
/// nondegenerate triangles; the measured four values must satisfy the planar
/// characterization.
pub fn higher_dim_probe(trials: usize, seed: u64) -> Result<ProbeReport> {
    let mut rng = sampling::rng(seed);
    let mut violations = Vec::new();
    let mut max_upper_ratio = 0.0_f64;
    let mut min_lower_ratio = f64::INFINITY;
    for trial in 0..trials {
        let k = rng.random_range(8..=16);
        let body = sampling::random_body(&mut rng, 3, k);
        let triangle = sampling::random_triangle(&mut rng, 3);
        let measured = measure_triangle(&triangle, &body)?;
        let (r, _) = PairRadii::canonical(measured[0], measured[1], measured[2]);
        if let Ok([lo, hi]) = banach_range(&r) {
            max_upper_ratio = max_upper_ratio.max(measured[3] / hi);
            min_lower_ratio = min_lower_ratio.min(measured[3] / lo);
        }
        let failed = probe_failures(measured);
        if !failed.is_empty() {
            violations.push(ProbeViolation {
                trial,
                generators: body.generators().to_vec(),
                triangle,
                measured,
                failed,
            });
        }
    }
    Ok(ProbeReport { trials, seed, tolerance: PROBE_TOL, violations, max_upper_ratio, min_lower_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(r12: f64, r13: f64, r23: f64) -> PairRadii {
        PairRadii { r12, r13, r23 }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn reference_triangle_is_unit_equilateral() {
        let p = reference_triangle();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(close(p[i].dist(&p[j]), SQRT3, 1e-15));
        }
        for v in &p {
            assert!(close(v.norm(), 1.0, 1e-15));
        }
        let centroid = &(&p[0] + &p[1]) + &p[2];
        assert!(centroid.max_abs() < 1e-15);
    }

    #[test]
    fn canonical_ordering() {
        let d = ThreePointDiversity::new(2.0, 1.0, 1.5, 2.0).unwrap();
        assert_eq!(d.perm, [0, 1, 2]);
        // Ties keep the identity.
        assert_eq!(ThreePointDiversity::new(2.0, 2.0, 1.0, 2.0).unwrap().perm, [0, 1, 2]);

        let d = ThreePointDiversity::new(1.0, 2.0, 3.0, 3.0).unwrap();
        let all = [d.d12, d.d13, d.d23];
        assert!(d.d13 <= d.d12);
        assert_eq!(d.perm, [0, 2, 1]);
        assert_eq!((d.d12, d.d13, d.d23), (2.0, 1.0, 3.0));
        assert_eq!(d.original_pairs(), [1.0, 2.0, 3.0]);
        let mut sorted = all;
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, [1.0, 2.0, 3.0]);
    }

    #[test]
    fn canonicalize_checks_table() {
        let ok = canonicalize(&DiversityTable::three_point(2.0, 2.0, 1.0, 2.5)).unwrap();
        assert_eq!((ok.d12, ok.d13, ok.d23, ok.d123), (2.0, 2.0, 1.0, 2.5));
        assert!(matches!(
            canonicalize(&DiversityTable::three_point(2.0, 2.0, 1.0, 5.0)),
            Err(Error::InvalidDiversity(_))
        ));
        let four = DiversityTable::from_fn((1..=4).map(|i| format!("x{i}")).collect(), |m| {
            if m.count_ones() > 1 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(canonicalize(&four), Err(Error::NotThreePoints(4)));
    }

    #[test]
    fn pairwise_feasibility_examples() {
        assert!(pairwise_feasible(&pairs(2.0, 2.0, 1.0)));
        assert!(!pairwise_feasible(&pairs(2.0, 1.0, 3.5)));
        assert!(pairwise_feasible(&pairs(2.0, 1.0, 1.0)));
    }

    #[test]
    fn minkowski_range_examples() {
        assert_eq!(minkowski_range(&pairs(2.0, 2.0, 1.0)), [2.0, 3.0]);
        assert_eq!(minkowski_range(&pairs(1.0, 1.0, 1.0)), [1.0, 2.0]);
        assert_eq!(minkowski_range(&pairs(2.0, 1.0, 1.0)), [2.0, 2.0]);
    }

    #[test]
    fn banach_range_examples() {
        let [lo, hi] = banach_range(&pairs(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(lo, 1.0);
        assert!(close(hi, 4.0 / 3.0, 1e-15));
        let [lo, hi] = banach_range(&pairs(2.0, 2.0, 1.0)).unwrap();
        assert_eq!(lo, 2.0);
        assert!(close(hi, 16.0 / 7.0, 1e-15));
        assert_eq!(banach_range(&pairs(2.0, 1.0, 1.0)).unwrap(), [2.0, 2.0]);
        assert!(close(printed_banach_upper(&pairs(2.0, 2.0, 1.0)).unwrap(), 32.0 * SQRT3 / 21.0, 1e-14));
        assert!(matches!(banach_range(&pairs(1.0, 1.0, 4.0)), Err(Error::DegenerateQuadratic(_))));
    }

    #[test]
    fn banach_upper_matches_hexagon_lp() {
        for r in [pairs(1.0, 1.0, 1.0), pairs(2.0, 2.0, 1.0), pairs(2.0, 1.0, 1.0), pairs(3.0, 1.5, 2.2)] {
            let hex = hexagon_witness(&r).unwrap();
            let lp = circumradius_value(&reference_triangle(), &hex.body).unwrap();
            let hi = banach_range(&r).unwrap()[1];
            assert!(close(lp, hi, 1e-9 * hi), "{r:?}: lp {lp} vs {hi}");
        }
    }

    #[test]
    fn decisions() {
        let d = decide(&ThreePointDiversity::new(2.0, 2.0, 1.0, 2.0).unwrap());
        assert!(d.banach && d.minkowski);
        let d = decide(&ThreePointDiversity::new(2.0, 2.0, 1.0, 2.9).unwrap());
        assert!(d.minkowski && !d.banach);
        assert_eq!(d.failed_inequalities, ["triple_upper"]);
        let d = decide(&ThreePointDiversity::new(1.0, 1.0, 1.0, 1.0).unwrap());
        assert!(d.banach);
        let d = decide(&ThreePointDiversity::new(2.0, 1.0, 3.5, 3.5).unwrap());
        assert!(!d.banach);
        assert!(d.failed_inequalities.contains(&"pairwise_upper".to_string()));
        assert!(d.banach_interval.is_none());
    }

    #[test]
    fn boundary_points_examples() {
        let pts = boundary_points(&pairs(1.0, 1.0, 1.0));
        let s = SQRT3;
        let expect =
            [[s / 2.0, 0.0], [-s / 2.0, 0.0], [s / 4.0, 0.75], [-s / 4.0, -0.75], [s / 4.0, -0.75], [-s / 4.0, 0.75]];
        for (p, e) in pts.iter().zip(expect) {
            assert!(p.approx_eq(&Vector::from(e), 1e-15), "{p:?} vs {e:?}");
        }
        let halved = boundary_points(&pairs(2.0, 2.0, 2.0));
        for (p, q) in pts.iter().zip(&halved) {
            assert!(q.approx_eq(&p.scale(0.5), 1e-15));
        }
        let r = pairs(2.0, 2.0, 1.0);
        let hex = hexagon_witness(&r).unwrap();
        for p in boundary_points(&r) {
            assert!(close(hex.body.gauge(&p).unwrap(), 1.0, 1e-9));
        }
    }

    #[test]
    fn hexagon_witness_examples() {
        let hex = hexagon_witness(&pairs(1.0, 1.0, 1.0)).unwrap();
        assert!(!hex.degenerate);
        let poly = hex.body.to_polygon().unwrap();
        assert_eq!(poly.len(), 6);
        for v in poly.vertices() {
            assert!(close(v.norm(), SQRT3 / 2.0, 1e-15));
        }
        assert!(!hexagon_witness(&pairs(2.0, 2.0, 1.0)).unwrap().degenerate);
        let flat = hexagon_witness(&pairs(2.0, 1.0, 1.0)).unwrap();
        assert!(flat.degenerate);
        assert_eq!(flat.body.to_polygon().unwrap().len(), 4);
        assert!(hexagon_witness(&pairs(2.0, 1.0, 3.5)).is_err());
    }

    #[test]
    fn hexagon_pairwise_radii_round_trip() {
        let r = pairs(2.0, 1.5, 1.2);
        let hex = hexagon_witness(&r).unwrap();
        let m = measure_triangle(&reference_triangle(), &hex.body).unwrap();
        assert!(close(m[0], r.r12, 1e-9));
        assert!(close(m[1], r.r13, 1e-9));
        assert!(close(m[2], r.r23, 1e-9));
    }

    #[test]
    fn placement_unit_values() {
        let p = optimal_placement(&pairs(1.0, 1.0, 1.0)).unwrap();
        assert!(close(p.lambda, 3.0 * SQRT3 / 8.0, 1e-15));
        for t in [p.t1, p.t2, p.t3] {
            assert!(close(t, 0.5, 1e-15));
        }
        assert!(close(p.x0, 0.0, 1e-15));
        assert!(close(p.y0, 0.75, 1e-15));
        // The apex is the t1-point of the top hexagon edge.
        let [start, end] = &p.contact_edges()[2];
        assert!(Vector::from([p.x0, p.y0]).approx_eq(&start.lerp(end, p.t1), 1e-15));
        assert!(close(p.achieved_radius(), 4.0 / 3.0, 1e-15));
    }

    #[test]
    fn placement_vertices_on_their_edges() {
        for r in [pairs(2.0, 2.0, 1.0), pairs(3.0, 1.5, 2.2), pairs(1.0, 0.6, 1.3)] {
            let p = optimal_placement(&r).unwrap();
            let tri = p.triangle();
            let edges = p.contact_edges();
            for (t, (v, [s, e])) in [p.t3, p.t2, p.t1].into_iter().zip(tri.iter().zip(&edges)) {
                assert!(v.approx_eq(&s.lerp(e, t), 1e-12), "{r:?}: {v:?} not at t={t} on [{s:?}, {e:?}]");
            }
            let hex = hexagon_witness(&r).unwrap();
            for v in &tri {
                assert!(close(hex.body.gauge(v).unwrap(), 1.0, 1e-9));
            }
            let hi = banach_range(&r).unwrap()[1];
            assert!(close(p.achieved_radius(), hi, 1e-12 * hi));
        }
    }

    #[test]
    fn printed_abscissa_is_off_the_edge() {
        let p = optimal_placement(&pairs(2.0, 2.0, 1.0)).unwrap();
        let printed = printed_x0(p.a, p.b, p.c);
        assert!(close(printed, -p.x0, 1e-15));
        assert!(p.x0 > 0.05);
        let unit = optimal_placement(&pairs(1.0, 1.0, 1.0)).unwrap();
        assert!(close(printed_x0(unit.a, unit.b, unit.c), unit.x0, 1e-15));
    }

    #[test]
    fn t_lambda_examples() {
        assert!(check_t_lambda(1.0, 1.0, 1.0).unwrap());
        let [t1, t2, t3, lambda] = t_lambda(1.0, 1.0, 1.0);
        assert_eq!([t1, t2, t3, lambda], [0.5, 0.5, 0.5, 0.75]);
        assert!(check_t_lambda(1.0, 2.0, 2.0 / 3.0).unwrap());
        assert!(close(t_lambda(1.0, 2.0, 2.0 / 3.0)[0], 1.0, 1e-15));
        assert!(matches!(check_t_lambda(2.0, 1.0, 1.0), Err(Error::PreconditionViolated(_))));
        assert!(matches!(check_t_lambda(1.0, 2.0, 0.5), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn psd_identity_examples() {
        assert_eq!(psd_identity_residual(1.0, 1.0, 1.0), 0.0);
        assert_eq!(psd_identity_residual(3.0, -2.0, 7.0), 0.0);
    }

    #[test]
    fn witness_endpoints_and_interior() {
        let r = pairs(1.0, 1.0, 1.0);
        let top = witness_for_target(&r, 4.0 / 3.0).unwrap();
        assert_eq!(top.s, 0.0);
        assert_eq!(top.body, hexagon_witness(&r).unwrap().body);

        let bottom = witness_for_target(&r, 1.0).unwrap();
        assert!(close(bottom.measured, 1.0, 1e-9));
        assert!(bottom.s > 0.99);

        let mid = witness_for_target(&r, 1.2).unwrap();
        assert!(mid.s > 0.0 && mid.s < 1.0);
        let m = measure_triangle(&reference_triangle(), &mid.body).unwrap();
        for (got, want) in m.iter().zip([1.0, 1.0, 1.0, 1.2]) {
            assert!(close(*got, want, 1e-6), "{m:?}");
        }
        assert!(matches!(witness_for_target(&r, 1.5), Err(Error::TargetOutOfRange { .. })));
    }

    #[test]
    fn witness_in_degenerate_case() {
        let r = pairs(2.0, 1.0, 1.0);
        let w = witness_for_target(&r, 2.0).unwrap();
        let m = measure_triangle(&reference_triangle(), &w.body).unwrap();
        for (got, want) in m.iter().zip([2.0, 1.0, 1.0, 2.0]) {
            assert!(close(*got, want, 1e-6), "{m:?}");
        }
    }

    #[test]
    fn embedding_respects_original_labels() {
        let d = ThreePointDiversity::new(1.0, 2.0, 1.5, 2.05).unwrap();
        assert_ne!(d.perm, [0, 1, 2]);
        let e = embed(&d).unwrap();
        let m = measure_triangle(&e.points, &e.body).unwrap();
        for (got, want) in m.iter().zip([1.0, 2.0, 1.5, 2.05]) {
            assert!(close(*got, want, 1e-6), "{m:?}");
        }
    }

    #[test]
    fn relabeling_maps_are_triangle_symmetries() {
        let p = reference_triangle();
        for perm in PERMUTATIONS {
            let q = relabeling_map(perm);
            for i in 0..3 {
                assert!(q(&p[i]).approx_eq(&p[perm[i]], 1e-14), "{perm:?}");
            }
        }
    }

    #[test]
    fn planar_body_inside_space() {
        let s = SQRT3;
        let body = SymmetricPolytope::new(vec![
            Vector::from([s / 2.0, 0.0, 0.0]),
            Vector::from([s / 4.0, 0.75, 0.0]),
            Vector::from([s / 4.0, -0.75, 0.0]),
            Vector::from([0.1, 0.2, 10.0]),
        ])
        .unwrap();
        let tri = reference_triangle().map(|v| Vector::from([v[0], v[1], 0.0]));
        let m = measure_triangle(&tri, &body).unwrap();
        assert!(probe_failures(m).is_empty(), "{m:?}");
    }

    #[test]
    fn small_probe_is_clean() {
        let report = higher_dim_probe(20, 42).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(report.max_upper_ratio <= 1.0 + 1e-7);
        assert!(report.min_lower_ratio >= 1.0 - 1e-7);
    }
}
