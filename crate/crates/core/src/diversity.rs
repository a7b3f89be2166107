//! Finite diversity tables and their axioms.
//!
//! A diversity assigns a nonnegative value to every finite subset with
//!
//! * (D1) `δ(A) = 0` iff `|A| <= 1`,
//! * (D2) `δ(A ∪ C) <= δ(A ∪ B) + δ(B ∪ C)` whenever `B` is nonempty.
//!
//! Subsets of the ground set are bitmasks internally; JSON keys are the
//! member labels joined by `,` in ground order (parsing ignores order).

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circum::{circumradius, circumradius_value};
use crate::error::{Error, Result};
use crate::geom::{SymmetricPolytope, Vector};
use crate::sampling;

/// Largest ground set a table may have (the table itself has `2^n - 1` entries).
pub const MAX_GROUND: usize = 16;
/// Grounds up to this size get an exhaustive (D2) check.
pub const EXHAUSTIVE_LIMIT: usize = 6;
/// Number of sampled (A, B, C) triples for larger grounds.
pub const D2_SAMPLES: usize = 10_000;
/// Largest point set accepted by [`induced_diversity`].
pub const MAX_INDUCED_POINTS: usize = 6;

pub type Subset = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityTable {
    ground: Vec<String>,
    /// Indexed by subset mask; entry 0 (the empty set) is 0.
    values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiversityJson {
    pub ground: Vec<String>,
    pub values: BTreeMap<String, f64>,
}

fn check_ground(ground: &[String]) -> Result<()> {
    if ground.is_empty() {
        return Err(Error::InvalidInput("empty ground set".into()));
    }
    if ground.len() > MAX_GROUND {
        return Err(Error::InvalidInput(format!(
            "ground set of {} elements exceeds the limit of {MAX_GROUND}",
            ground.len()
        )));
    }
    let mut seen = HashMap::new();
    for (i, g) in ground.iter().enumerate() {
        if g.is_empty() || g.contains(',') {
            return Err(Error::InvalidInput(format!("invalid label {g:?}")));
        }
        if seen.insert(g.as_str(), i).is_some() {
            return Err(Error::InvalidInput(format!("duplicate label {g:?}")));
        }
    }
    Ok(())
}

impl DiversityTable {
    /// Builds a table by evaluating `f` on every nonempty subset mask.
    pub fn from_fn(ground: Vec<String>, mut f: impl FnMut(Subset) -> f64) -> Result<Self> {
        check_ground(&ground)?;
        let full = 1usize << ground.len();
        let mut values = vec![0.0; full];
        for (mask, slot) in values.iter_mut().enumerate().skip(1) {
            *slot = f(mask as Subset);
        }
        Ok(Self { ground, values })
    }

    /// Try-variant of [`DiversityTable::from_fn`].
    pub fn try_from_fn(ground: Vec<String>, mut f: impl FnMut(Subset) -> Result<f64>) -> Result<Self> {
        check_ground(&ground)?;
        let full = 1usize << ground.len();
        let mut values = vec![0.0; full];
        for (mask, slot) in values.iter_mut().enumerate().skip(1) {
            *slot = f(mask as Subset)?;
        }
        Ok(Self { ground, values })
    }

    /// Three-point table from `(δ12, δ13, δ23, δ123)` on labels `x1, x2, x3`.
    pub fn three_point(d12: f64, d13: f64, d23: f64, d123: f64) -> Self {
        let ground = vec!["x1".to_string(), "x2".to_string(), "x3".to_string()];
        Self::from_fn(ground, |mask| match mask {
            0b011 => d12,
            0b101 => d13,
            0b110 => d23,
            0b111 => d123,
            _ => 0.0,
        })
        .expect("fixed ground is valid")
    }

    pub fn from_json(json: &DiversityJson) -> Result<Self> {
        check_ground(&json.ground)?;
        let index: HashMap<&str, usize> = json.ground.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
        let full = 1usize << json.ground.len();
        let mut values = vec![f64::NAN; full];
        values[0] = 0.0;
        for (key, &value) in &json.values {
            let mut mask = 0usize;
            for label in key.split(',').map(str::trim) {
                let Some(&i) = index.get(label) else {
                    return Err(Error::InvalidInput(format!("unknown label {label:?} in key {key:?}")));
                };
                if mask & (1 << i) != 0 {
                    return Err(Error::InvalidInput(format!("repeated label in key {key:?}")));
                }
                mask |= 1 << i;
            }
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidInput(format!("value {value} for {key:?} is not a nonnegative real")));
            }
            if !values[mask].is_nan() {
                return Err(Error::InvalidInput(format!("subset {key:?} given twice")));
            }
            values[mask] = value;
        }
        let table = Self { ground: json.ground.clone(), values };
        if let Some(mask) = (1..full).find(|&m| table.values[m].is_nan()) {
            return Err(Error::IncompleteTable(table.key(mask as Subset)));
        }
        Ok(table)
    }

    pub fn to_json(&self) -> DiversityJson {
        DiversityJson {
            ground: self.ground.clone(),
            values: (1..self.values.len()).map(|m| (self.key(m as Subset), self.values[m])).collect(),
        }
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn size(&self) -> usize {
        self.ground.len()
    }

    pub fn full_mask(&self) -> Subset {
        ((1usize << self.ground.len()) - 1) as Subset
    }

    pub fn get(&self, mask: Subset) -> f64 {
        self.values[mask as usize]
    }

    /// Value on the subset named by `labels`.
    pub fn value(&self, labels: &[&str]) -> Option<f64> {
        let mut mask = 0;
        for l in labels {
            mask |= 1 << self.ground.iter().position(|g| g == l)?;
        }
        Some(self.get(mask))
    }

    pub fn key(&self, mask: Subset) -> String {
        self.ground
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, g)| g.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    D1,
    D2,
    #[serde(rename = "MONO")]
    Mono,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Witness subsets: `[A]` for D1, `[A, B, C]` for D2, `[smaller, larger]` for MONO.
    pub subsets: Vec<String>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Total violations found; `violations` keeps at most [`REPORTED_VIOLATIONS`].
    pub violation_count: usize,
    pub exhaustive: bool,
    pub d2_triples_checked: usize,
    pub tolerance: f64,
}

pub const REPORTED_VIOLATIONS: usize = 32;

#[derive(Debug, Clone, Copy)]
pub struct AxiomCheck {
    /// Relative slack: comparisons allow `tolerance * (1 + max value)`.
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for AxiomCheck {
    fn default() -> Self {
        Self { tolerance: 1e-9, samples: D2_SAMPLES, seed: 0 }
    }
}

pub fn check_axioms(table: &DiversityTable) -> AxiomReport {
    check_axioms_with(table, &AxiomCheck::default())
}

pub fn check_axioms_with(table: &DiversityTable, opts: &AxiomCheck) -> AxiomReport {
    let tol = opts.tolerance * (1.0 + table.max_value());
    let n = table.size();
    let full = table.full_mask();
    let mut violations = Vec::new();
    let mut count = 0usize;
    let mut record = |v: Violation| {
        count += 1;
        if violations.len() < REPORTED_VIOLATIONS {
            violations.push(v);
        }
    };

    for mask in 1..=full {
        let v = table.get(mask);
        let size = mask.count_ones();
        if (size <= 1 && v.abs() > tol) || (size >= 2 && v <= 0.0) {
            record(Violation { axiom: Axiom::D1, subsets: vec![table.key(mask)], lhs: v, rhs: 0.0 });
        }
    }

    let d2 = |a: Subset, b: Subset, c: Subset, record: &mut dyn FnMut(Violation)| {
        let lhs = table.get(a | c);
        let rhs = table.get(a | b) + table.get(b | c);
        if lhs > rhs + tol {
            record(Violation { axiom: Axiom::D2, subsets: vec![table.key(a), table.key(b), table.key(c)], lhs, rhs });
        }
    };
    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let mut checked = 0usize;
    if exhaustive {
        for a in 0..=full {
            for c in a..=full {
                // (D2) is symmetric in A and C.
                for b in 1..=full {
                    d2(a, b, c, &mut record);
                    checked += 1;
                }
            }
        }
    } else {
        let mut rng = sampling::rng(opts.seed);
        for _ in 0..opts.samples {
            let a = rng.random_range(0..=full);
            let b = rng.random_range(1..=full);
            let c = rng.random_range(0..=full);
            d2(a, b, c, &mut record);
            checked += 1;
        }
    }

    for mask in 1..full {
        for i in 0..n {
            let bit = 1 << i;
            if mask & bit == 0 && table.get(mask) > table.get(mask | bit) + tol {
                record(Violation {
                    axiom: Axiom::Mono,
                    subsets: vec![table.key(mask), table.key(mask | bit)],
                    lhs: table.get(mask),
                    rhs: table.get(mask | bit),
                });
            }
        }
    }

    AxiomReport {
        ok: count == 0,
        violations,
        violation_count: count,
        exhaustive,
        d2_triples_checked: checked,
        tolerance: tol,
    }
}

/// A finite metric given by its distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTable {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl MetricTable {
    /// Validates identity, symmetry, positivity and the triangle inequality.
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        check_ground(&labels)?;
        if dist.len() != n || dist.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("distance matrix shape does not match labels".into()));
        }
        let scale = dist.iter().flatten().fold(0.0_f64, |m, &d| m.max(d.abs()));
        let tol = 1e-9 * (1.0 + scale);
        let not_metric = |reason: &str, idx: &[usize]| Error::NotAMetric {
            reason: reason.to_string(),
            witness: idx.iter().map(|&i| labels[i].clone()).collect(),
        };
        for i in 0..n {
            if dist[i][i] != 0.0 {
                return Err(not_metric("nonzero self-distance", &[i]));
            }
            for j in 0..n {
                if !dist[i][j].is_finite() {
                    return Err(not_metric("non-finite distance", &[i, j]));
                }
                if i != j && dist[i][j] <= 0.0 {
                    return Err(not_metric("distinct points at distance zero or less", &[i, j]));
                }
                if (dist[i][j] - dist[j][i]).abs() > tol {
                    return Err(not_metric("asymmetric distance", &[i, j]));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][j] > dist[i][k] + dist[k][j] + tol {
                        return Err(not_metric("triangle inequality fails", &[i, k, j]));
                    }
                }
            }
        }
        Ok(Self { labels, dist })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    fn members(mask: Subset, n: usize) -> impl Iterator<Item = usize> {
        (0..n).filter(move |i| mask & (1 << i) != 0)
    }

    fn pairs(&self, mask: Subset) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        Self::members(mask, n)
            .flat_map(move |i| Self::members(mask, n).filter(move |&j| j > i).map(move |j| (i, j)))
            .map(|(i, j)| self.dist[i][j])
    }
}

/// `δ(A) = max_{a,b ∈ A} d(a,b)`.
pub fn diameter_diversity(metric: &MetricTable) -> DiversityTable {
    DiversityTable::from_fn(metric.labels.clone(), |mask| metric.pairs(mask).fold(0.0, f64::max))
        .expect("metric labels already validated")
}

/// `δ(A) = Σ_{a,b ∈ A} d(a,b)` over unordered pairs.
///
/// Note that this table generally fails (D2): with `B ⊂ A` a single shared
/// point, the cross distances between `A` and `C` are not paid for.
pub fn sum_diversity(metric: &MetricTable) -> DiversityTable {
    DiversityTable::from_fn(metric.labels.clone(), |mask| metric.pairs(mask).sum())
        .expect("metric labels already validated")
}

/// The metric `d(a, b) = δ({a, b})`.
pub fn induced_metric(table: &DiversityTable) -> MetricTable {
    let n = table.size();
    let dist =
        (0..n).map(|i| (0..n).map(|j| if i == j { 0.0 } else { table.get((1 << i) | (1 << j)) }).collect()).collect();
    MetricTable { labels: table.ground.clone(), dist }
}

/// The Minkowski diversity `δ(A) = R(A, C)` on at most six labeled points.
pub fn induced_diversity(points: &[Vector], body: &SymmetricPolytope) -> Result<DiversityTable> {
    let labels = (1..=points.len()).map(|i| format!("p{i}")).collect();
    induced_diversity_labeled(points, labels, body)
}

pub fn induced_diversity_labeled(
    points: &[Vector],
    labels: Vec<String>,
    body: &SymmetricPolytope,
) -> Result<DiversityTable> {
    if points.is_empty() || points.len() > MAX_INDUCED_POINTS {
        return Err(Error::InvalidInput(format!(
            "induced diversity needs 1..={MAX_INDUCED_POINTS} points, got {}",
            points.len()
        )));
    }
    if labels.len() != points.len() {
        return Err(Error::InvalidInput("one label per point required".into()));
    }
    DiversityTable::try_from_fn(labels, |mask| {
        if mask.count_ones() <= 1 {
            return Ok(0.0);
        }
        let subset: Vec<Vector> =
            (0..points.len()).filter(|i| mask & (1 << i) != 0).map(|i| points[i].clone()).collect();
        circumradius_value(&subset, body)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingWitness {
    /// Translation of `A`.
    pub a: Vector,
    /// Translation of `B`.
    pub b: Vector,
    pub radius_a: f64,
    pub radius_b: f64,
    /// `R((a + A) ∪ (b + B), C)`
    pub union_radius: f64,
}

impl MixingWitness {
    pub fn bound(&self) -> f64 {
        self.radius_a.max(self.radius_b)
    }
}

/// Translations placing `A` and `B` concentrically in `C`, so that the
/// union of the translates has circumradius at most `max(R(A,C), R(B,C))`.
pub fn mixing_witness(a_set: &[Vector], b_set: &[Vector], body: &SymmetricPolytope) -> Result<MixingWitness> {
    let ra = circumradius(a_set, body)?;
    let rb = circumradius(b_set, body)?;
    let union: Vec<Vector> = a_set.iter().map(|p| &ra.center + p).chain(b_set.iter().map(|p| &rb.center + p)).collect();
    let union_radius = circumradius_value(&union, body)?;
    Ok(MixingWitness { a: ra.center, b: rb.center, radius_a: ra.radius, radius_b: rb.radius, union_radius })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublinearViolation {
    /// `"L1"` for `R(A+B) <= R(A)+R(B)`, `"L2"` for `R(λA) = |λ| R(A)`.
    pub property: &'static str,
    pub set_a: Vec<Vector>,
    pub set_b: Vec<Vector>,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SublinearReport {
    pub ok: bool,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub violations: Vec<SublinearViolation>,
}

/// Sampled check that `X ↦ R(X, C)` is a seminorm on finite sets.
///
/// Trial 0 uses `λ = -1` and trial 1 uses `λ = 0`; the rest draw `λ`
/// uniformly from `[-3, 3]`.
pub fn check_sublinear_samples(body: &SymmetricPolytope, trials: usize, seed: u64) -> Result<SublinearReport> {
    const TOL: f64 = 1e-8;
    let mut rng = sampling::rng(seed);
    let d = body.dim();
    let mut violations = Vec::new();
    for trial in 0..trials {
        let na = rng.random_range(1..=4);
        let nb = rng.random_range(1..=4);
        let a_set = sampling::random_points(&mut rng, d, na, 1.0);
        let b_set = sampling::random_points(&mut rng, d, nb, 1.0);
        let lambda = match trial {
            0 => -1.0,
            1 => 0.0,
            _ => rng.random_range(-3.0..3.0),
        };
        let ra = circumradius_value(&a_set, body)?;
        let rb = circumradius_value(&b_set, body)?;
        let sum: Vec<Vector> = a_set.iter().flat_map(|p| b_set.iter().map(move |q| p + q)).collect();
        let rsum = circumradius_value(&sum, body)?;
        if rsum > ra + rb + TOL * (1.0 + ra + rb) {
            violations.push(SublinearViolation {
                property: "L1",
                set_a: a_set.clone(),
                set_b: b_set.clone(),
                lambda,
                lhs: rsum,
                rhs: ra + rb,
            });
        }
        let scaled: Vec<Vector> = a_set.iter().map(|p| p.scale(lambda)).collect();
        let rl = circumradius_value(&scaled, body)?;
        let expected = lambda.abs() * ra;
        if (rl - expected).abs() > TOL * (1.0 + expected) {
            violations.push(SublinearViolation {
                property: "L2",
                set_a: a_set,
                set_b: Vec::new(),
                lambda,
                lhs: rl,
                rhs: expected,
            });
        }
    }
    Ok(SublinearReport { ok: violations.is_empty(), trials, seed, tolerance: TOL, violations })
}
