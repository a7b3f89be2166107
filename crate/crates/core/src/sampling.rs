//! Reproducible random instances for property suites and probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{SymmetricPolytope, Vector};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in `[-scale, scale]^dim`.
pub fn random_point(rng: &mut SampleRng, dim: usize, scale: f64) -> Vector {
    Vector::new((0..dim).map(|_| rng.random_range(-scale..scale)).collect())
}

pub fn random_points(rng: &mut SampleRng, dim: usize, count: usize, scale: f64) -> Vec<Vector> {
    (0..count).map(|_| random_point(rng, dim, scale)).collect()
}

/// A random full-dimensional symmetric polytope with `generators` ± pairs:
/// random directions with Euclidean length in `[0.5, 2]`.
pub fn random_body(rng: &mut SampleRng, dim: usize, generators: usize) -> SymmetricPolytope {
    loop {
        let gens: Vec<Vector> = (0..generators.max(dim))
            .map(|_| loop {
                let dir = random_point(rng, dim, 1.0);
                let n = dir.norm();
                if n > 0.1 && n <= 1.0 {
                    break dir.scale(rng.random_range(0.5..2.0) / n);
                }
            })
            .collect();
        if let Ok(body) = SymmetricPolytope::new(gens) {
            return body;
        }
    }
}

/// Twice the area of the triangle `abc` in any dimension.
pub fn triangle_area2(a: &Vector, b: &Vector, c: &Vector) -> f64 {
    let u = b - a;
    let w = c - a;
    let uu = u.dot(&u);
    let ww = w.dot(&w);
    let uw = u.dot(&w);
    (uu * ww - uw * uw).max(0.0).sqrt()
}

/// Three points whose triangle is not nearly collinear: twice its area is at
/// least `0.05 * (longest side)^2`.
pub fn random_triangle(rng: &mut SampleRng, dim: usize) -> [Vector; 3] {
    loop {
        let a = random_point(rng, dim, 1.0);
        let b = random_point(rng, dim, 1.0);
        let c = random_point(rng, dim, 1.0);
        let longest = a.dist(&b).max(a.dist(&c)).max(b.dist(&c));
        if longest > 0.1 && triangle_area2(&a, &b, &c) >= 0.05 * longest * longest {
            return [a, b, c];
        }
    }
}

/// Independent stream `trial` of `seed`, so trials can be drawn in any order.
pub fn trial_rng(seed: u64, trial: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
