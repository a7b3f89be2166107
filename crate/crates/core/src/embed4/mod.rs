//! Four points: necessary conditions, the face-contact system, and a
//! sampling harness for the conjectured characterization.
//!
//! The points are the corner simplex `p1 = e1, p2 = 0, p3 = e2, p4 = e3` and
//! the body is `conv(±P_ij)` with `P_ij = (p_i - p_j) / (2 R_ij)`, the
//! smallest symmetric body with the prescribed pairwise radii.

mod formulas;

pub use formulas::{coefficient_a, r1234_bound};

use rand::Rng;
use serde::Serialize;

use crate::circum::{circumradius_value, circumradius_value_with};
use crate::embed3::{banach_range, PairRadii};
use crate::error::{Error, Result};
use crate::geom::{SymmetricPolytope, Vector};
use crate::linprog::SolverOptions;
use crate::sampling;

/// Pair order used by every array of radii in this module.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
/// The four triples, as point indices.
pub const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
/// Absolute-plus-relative slack for conjecture verdicts.
pub const VERDICT_TOL: f64 = 1e-7;
/// Slack for deciding that face-system coefficients are convex weights.
pub const COEFFICIENT_TOL: f64 = 1e-9;
/// Relative agreement required between the printed and the solved `a`.
pub const A_MATCH_TOL: f64 = 1e-8;
/// Sampling range of each radius (log-uniform).
pub const SAMPLE_RANGE: (f64, f64) = (0.5, 2.0);

fn pair_index(i: usize, j: usize) -> usize {
    let key = (i.min(j), i.max(j));
    PAIRS.iter().position(|&p| p == key).expect("distinct indices below 4")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourPointRadii {
    pub r12: f64,
    pub r13: f64,
    pub r14: f64,
    pub r23: f64,
    pub r24: f64,
    pub r34: f64,
}

impl FourPointRadii {
    /// Radii in `[12, 13, 14, 23, 24, 34]` order; all must be positive and finite.
    pub fn new(r: [f64; 6]) -> Result<Self> {
        if let Some(v) = r.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::InvalidInput(format!("radius {v} is not a positive real")));
        }
        let [r12, r13, r14, r23, r24, r34] = r;
        Ok(Self { r12, r13, r14, r23, r24, r34 })
    }

    pub fn uniform(r: f64) -> Result<Self> {
        Self::new([r; 6])
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.r12, self.r13, self.r14, self.r23, self.r24, self.r34]
    }

    /// `R_ij` for point indices `0..4`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.as_array()[pair_index(i, j)]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.as_array().map(|v| v * t))
    }

    fn slack(&self) -> f64 {
        crate::embed3::DECISION_SLACK * (1.0 + self.max())
    }
}

pub fn simplex_points() -> [Vector; 4] {
    [
        Vector::from([1.0, 0.0, 0.0]),
        Vector::from([0.0, 0.0, 0.0]),
        Vector::from([0.0, 1.0, 0.0]),
        Vector::from([0.0, 0.0, 1.0]),
    ]
}

/// `P_ij = (p_i - p_j) / (2 R_ij)` in pair order.
pub fn pair_generators(r: &FourPointRadii) -> [Vector; 6] {
    let p = simplex_points();
    PAIRS.map(|(i, j)| (&p[i] - &p[j]).scale(0.5 / r.get(i, j)))
}

pub fn generators_from_radii(r: &FourPointRadii) -> Result<SymmetricPolytope> {
    SymmetricPolytope::new(pair_generators(r).to_vec())
}

/// `R_ij <= R_ik + R_kj` for the twelve (pair, third point) combinations.
pub fn pairwise_feasible4(r: &FourPointRadii) -> bool {
    pairwise_failures4(r).is_empty()
}

/// Failed combinations as `"Rij<=Rik+Rkj"` labels (1-based).
pub fn pairwise_failures4(r: &FourPointRadii) -> Vec<String> {
    let eps = r.slack();
    let mut failed = Vec::new();
    for (i, j) in PAIRS {
        for k in (0..4).filter(|&k| k != i && k != j) {
            if r.get(i, j) > r.get(i, k) + r.get(k, j) + eps {
                failed.push(format!(
                    "R{}{}<=R{}{}+R{}{}",
                    i + 1,
                    j + 1,
                    (i.min(k)) + 1,
                    (i.max(k)) + 1,
                    k.min(j) + 1,
                    k.max(j) + 1
                ));
            }
        }
    }
    failed
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleBound {
    /// Point indices (0-based).
    pub triple: [usize; 3],
    pub lo: f64,
    pub hi: f64,
}

/// Banach range of each triple, from its three pairwise radii.
pub fn triple_bounds(r: &FourPointRadii) -> Result<[TripleBound; 4]> {
    let mut out = [TripleBound { triple: [0; 3], lo: 0.0, hi: 0.0 }; 4];
    for (slot, t) in out.iter_mut().zip(TRIPLES) {
        let (pairs, _) = PairRadii::canonical(r.get(t[0], t[1]), r.get(t[0], t[2]), r.get(t[1], t[2]));
        let [lo, hi] = banach_range(&pairs)?;
        *slot = TripleBound { triple: t, lo, hi };
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaceSystemSolution {
    pub lambda: f64,
    pub x0: f64,
    pub y0: f64,
    pub z0: f64,
    /// `a, b, c, d, e, f, g, h`
    pub coeffs: [f64; 8],
    /// Every coefficient pair `(u, v)` has `u, v, 1 - u - v ∈ [0, 1]` and `λ > 0`.
    pub valid: bool,
    /// Largest violation of the four vector equations after substitution.
    pub residual: f64,
}

impl FaceSystemSolution {
    pub fn a(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn apex(&self) -> Vector {
        Vector::from([self.x0, self.y0, self.z0])
    }
}

/// One vector equation `X + λ·dir = base + u·(e1 - base) + v·(e2 - base)`.
struct FaceBlock {
    dir: [f64; 3],
    base: Vector,
    e1: Vector,
    e2: Vector,
}

fn face_blocks(r: &FourPointRadii) -> [FaceBlock; 4] {
    let g = |v: [f64; 3], rij: f64| Vector::from(v).scale(0.5 / rij);
    [
        // apex p4 on conv(P41, P42, P43)
        FaceBlock {
            dir: [0.0, 0.0, 0.0],
            base: g([-1.0, 0.0, 1.0], r.r14),
            e1: g([0.0, 0.0, 1.0], r.r24),
            e2: g([0.0, -1.0, 1.0], r.r34),
        },
        // p1 on conv(P12, P13, P14)
        FaceBlock {
            dir: [1.0, 0.0, -1.0],
            base: g([1.0, 0.0, 0.0], r.r12),
            e1: g([1.0, -1.0, 0.0], r.r13),
            e2: g([1.0, 0.0, -1.0], r.r14),
        },
        // p3 on conv(P31, P32, P34)
        FaceBlock {
            dir: [0.0, 1.0, -1.0],
            base: g([-1.0, 1.0, 0.0], r.r13),
            e1: g([0.0, 1.0, 0.0], r.r23),
            e2: g([0.0, 1.0, -1.0], r.r34),
        },
        // p2 on conv(P21, P23, P24)
        FaceBlock {
            dir: [0.0, 0.0, -1.0],
            base: g([-1.0, 0.0, 0.0], r.r12),
            e1: g([0.0, -1.0, 0.0], r.r23),
            e2: g([0.0, 0.0, -1.0], r.r24),
        },
    ]
}

/// Gaussian elimination with partial pivoting on a square system.
fn solve_dense<const N: usize>(mut m: [[f64; N]; N], mut rhs: [f64; N]) -> Result<[f64; N]> {
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    for col in 0..N {
        let pivot_row = (col..N).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).expect("nonempty range");
        let pivot = m[pivot_row][col];
        if pivot.abs() < 1e-12 * scale {
            return Err(Error::SingularSystem { column: col, pivot });
        }
        m.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        for row in col + 1..N {
            let factor = m[row][col] / pivot;
            if factor != 0.0 {
                for k in col..N {
                    m[row][k] -= factor * m[col][k];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let tail: f64 = (row + 1..N).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(x)
}

/// Solves the 12×12 system placing the four vertices of `λ·S` (translated)
/// on the faces `conv(P41,P42,P43)`, `conv(P12,P13,P14)`, `conv(P31,P32,P34)`,
/// `conv(P21,P23,P24)`. Unknowns: `x0, y0, z0, λ, a, ..., h`.
pub fn solve_face_system(r: &FourPointRadii) -> Result<FaceSystemSolution> {
    let blocks = face_blocks(r);
    let mut m = [[0.0; 12]; 12];
    let mut rhs = [0.0; 12];
    for (k, block) in blocks.iter().enumerate() {
        let (cu, cv) = (4 + 2 * k, 5 + 2 * k);
        for axis in 0..3 {
            let row = 3 * k + axis;
            m[row][axis] = 1.0;
            m[row][3] = block.dir[axis];
            m[row][cu] = -(block.e1[axis] - block.base[axis]);
            m[row][cv] = -(block.e2[axis] - block.base[axis]);
            rhs[row] = block.base[axis];
        }
    }
    let x = solve_dense(m, rhs)?;
    let coeffs: [f64; 8] = x[4..].try_into().expect("eight coefficients");

    let apex = Vector::from([x[0], x[1], x[2]]);
    let mut residual = 0.0_f64;
    for (k, block) in blocks.iter().enumerate() {
        let (u, v) = (coeffs[2 * k], coeffs[2 * k + 1]);
        let lhs = &apex + &Vector::from(block.dir).scale(x[3]);
        let rhs = &(&block.base + &(&block.e1 - &block.base).scale(u)) + &(&block.e2 - &block.base).scale(v);
        residual = residual.max((&lhs - &rhs).max_abs());
    }

    let tol = COEFFICIENT_TOL;
    let valid = x[3] > 0.0
        && coeffs.chunks(2).all(|uv| {
            let (u, v) = (uv[0], uv[1]);
            u >= -tol && v >= -tol && u + v <= 1.0 + tol
        });
    Ok(FaceSystemSolution { lambda: x[3], x0: x[0], y0: x[1], z0: x[2], coeffs, valid, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Consistent,
    BoundViolated,
    SystemInfeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureTrial {
    pub radii: FourPointRadii,
    /// LP-measured `R(S, conv(±P_ij))`.
    pub measured_r1234: f64,
    /// Largest LP-measured triple radius.
    pub lower: f64,
    /// Printed bound; `None` where its denominator vanishes.
    pub upper: Option<f64>,
    pub verdict: Verdict,
    pub system: Option<FaceSystemSolution>,
    /// Printed `a` where defined.
    pub printed_a: Option<f64>,
    /// LP-measured triple radii in [`TRIPLES`] order.
    pub triple_radii: [f64; 4],
    /// LP-measured pair radii; below `R_ij` when `P_ij` is not extreme.
    pub pair_radii: [f64; 6],
    /// `|1/λ - measured|` when the system coefficients are valid.
    pub lambda_gap: Option<f64>,
    /// Set when a bound violation was re-measured with the stricter LP settings.
    pub reverified: bool,
}

fn measure(r: &FourPointRadii, opts: &SolverOptions) -> Result<(SymmetricPolytope, f64, [f64; 4])> {
    let body = generators_from_radii(r)?;
    let p = simplex_points();
    let r1234 = circumradius_value_with(&p, &body, opts)?;
    let mut triples = [0.0; 4];
    for (slot, t) in triples.iter_mut().zip(TRIPLES) {
        *slot = circumradius_value_with(&t.map(|i| p[i].clone()), &body, opts)?;
    }
    Ok((body, r1234, triples))
}

fn classify(measured: f64, lower: f64, upper: Option<f64>, system_ok: bool) -> Verdict {
    let tol = VERDICT_TOL * (1.0 + measured);
    if !system_ok {
        return Verdict::SystemInfeasible;
    }
    match upper {
        Some(u) if lower <= measured + tol && measured <= u + tol => Verdict::Consistent,
        _ => Verdict::BoundViolated,
    }
}

pub fn conjecture_trial(r: &FourPointRadii) -> Result<ConjectureTrial> {
    let failed = pairwise_failures4(r);
    if !failed.is_empty() {
        return Err(Error::PreconditionViolated(format!("pairwise inequalities fail: {}", failed.join(", "))));
    }
    let (body, mut measured, mut triples) = measure(r, &SolverOptions::default())?;
    let p = simplex_points();
    let mut pair_radii = [0.0; 6];
    for (slot, (i, j)) in pair_radii.iter_mut().zip(PAIRS) {
        *slot = circumradius_value(&[p[i].clone(), p[j].clone()], &body)?;
    }
    let system = solve_face_system(r).ok();
    let system_ok = system.is_some_and(|s| s.valid);
    let upper = r1234_bound(r).ok();
    let lower = |t: &[f64; 4]| t.iter().copied().fold(0.0, f64::max);

    let mut verdict = classify(measured, lower(&triples), upper, system_ok);
    let mut reverified = false;
    if verdict == Verdict::BoundViolated {
        // A failed re-solve keeps the first measurement and leaves the flag unset.
        if let Ok((_, m, t)) = measure(r, &SolverOptions::tight()) {
            (measured, triples) = (m, t);
            verdict = classify(measured, lower(&triples), upper, system_ok);
            reverified = true;
        }
    }
    let lambda_gap = system.filter(|s| s.valid).map(|s| (1.0 / s.lambda - measured).abs());
    Ok(ConjectureTrial {
        radii: *r,
        measured_r1234: measured,
        lower: lower(&triples),
        upper,
        verdict,
        system,
        printed_a: coefficient_a(r).ok(),
        triple_radii: triples,
        pair_radii,
        lambda_gap,
        reverified,
    })
}

/// Log-uniform radii on [`SAMPLE_RANGE`], redrawn until [`pairwise_feasible4`] holds.
pub fn sample_radii(rng: &mut sampling::SampleRng) -> FourPointRadii {
    let (lo, hi) = (SAMPLE_RANGE.0.ln(), SAMPLE_RANGE.1.ln());
    loop {
        let r = FourPointRadii::new(std::array::from_fn(|_| rng.random_range(lo..hi).exp()))
            .expect("exponentials are positive");
        if pairwise_feasible4(&r) {
            return r;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
}

impl Extrema {
    fn push(slot: &mut Option<Extrema>, v: f64) {
        match slot {
            Some(e) => {
                e.min = e.min.min(v);
                e.max = e.max.max(v);
            }
            None => *slot = Some(Extrema { min: v, max: v }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictCounts {
    pub consistent: usize,
    pub bound_violated: usize,
    pub system_infeasible: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureSummary {
    pub count: usize,
    pub seed: u64,
    pub counts: VerdictCounts,
    pub valid_contact_trials: usize,
    /// Extrema of `measured - lower`.
    pub measured_minus_lower: Option<Extrema>,
    /// Extrema of `upper - measured` where the printed bound is defined.
    pub upper_minus_measured: Option<Extrema>,
    pub upper_undefined: usize,
    pub max_lambda_gap: Option<f64>,
    /// Trials where the printed `a` is defined and differs from the solved one
    /// by more than [`A_MATCH_TOL`] relative.
    pub coefficient_a_mismatches: usize,
    pub coefficient_a_compared: usize,
    /// Indices of the non-consistent trials (their records are in `trials`).
    pub non_consistent: Vec<usize>,
}

pub fn coefficient_a_matches(printed: f64, solved: f64) -> bool {
    (printed - solved).abs() <= A_MATCH_TOL * solved.abs().max(1.0)
}

/// `n` trials with per-trial random streams of `seed`; trial 0 has all radii 1.
pub fn conjecture_sample(n: usize, seed: u64) -> Result<(ConjectureSummary, Vec<ConjectureTrial>)> {
    let mut trials = Vec::with_capacity(n);
    for index in 0..n {
        let r = if index == 0 {
            FourPointRadii::uniform(1.0)?
        } else {
            sample_radii(&mut sampling::trial_rng(seed, index as u64))
        };
        trials.push(conjecture_trial(&r)?);
    }
    Ok((summarize(&trials, seed), trials))
}

pub fn summarize(trials: &[ConjectureTrial], seed: u64) -> ConjectureSummary {
    let mut counts = VerdictCounts { consistent: 0, bound_violated: 0, system_infeasible: 0 };
    let mut s = ConjectureSummary {
        count: trials.len(),
        seed,
        counts: counts.clone(),
        valid_contact_trials: 0,
        measured_minus_lower: None,
        upper_minus_measured: None,
        upper_undefined: 0,
        max_lambda_gap: None,
        coefficient_a_mismatches: 0,
        coefficient_a_compared: 0,
        non_consistent: Vec::new(),
    };
    for (i, t) in trials.iter().enumerate() {
        match t.verdict {
            Verdict::Consistent => counts.consistent += 1,
            Verdict::BoundViolated => counts.bound_violated += 1,
            Verdict::SystemInfeasible => counts.system_infeasible += 1,
        }
        if t.verdict != Verdict::Consistent {
            s.non_consistent.push(i);
        }
        Extrema::push(&mut s.measured_minus_lower, t.measured_r1234 - t.lower);
        match t.upper {
            Some(u) => Extrema::push(&mut s.upper_minus_measured, u - t.measured_r1234),
            None => s.upper_undefined += 1,
        }
        if let Some(gap) = t.lambda_gap {
            s.valid_contact_trials += 1;
            s.max_lambda_gap = Some(s.max_lambda_gap.map_or(gap, |m: f64| m.max(gap)));
        }
        if let (Some(printed), Some(sys)) = (t.printed_a, t.system) {
            s.coefficient_a_compared += 1;
            if !coefficient_a_matches(printed, sys.a()) {
                s.coefficient_a_mismatches += 1;
            }
        }
    }
    s.counts = counts;
    s
}
