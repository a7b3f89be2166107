use bdiv::circum::circumradius_value;
use bdiv::embed3::{
    banach_range, check_t_lambda, decide, embed, hexagon_witness, measure_triangle, minkowski_range, optimal_placement,
    psd_identity_residual, psd_terms, reference_triangle, witness_for_target, PairRadii, ThreePointDiversity,
};
use bdiv::embed4::{
    coefficient_a, conjecture_trial, r1234_bound, sample_radii, solve_face_system, triple_bounds, FourPointRadii,
};
use bdiv::sampling;
use proptest::prelude::*;

/// Canonical pairwise values inside the feasible region, including its boundary.
fn valid_pairs() -> impl Strategy<Value = PairRadii> {
    (0.2..5.0f64, 0.05..=1.0f64, 0.0..=1.0f64).prop_map(|(r12, f13, s)| {
        let r13 = r12 * f13;
        let r23 = (r12 - r13) + s * 2.0 * r13;
        PairRadii { r12, r13, r23: r23.max(1e-3) }
    })
}

fn interior_pairs() -> impl Strategy<Value = PairRadii> {
    (0.2..5.0f64, 0.1..=1.0f64, 0.02..0.98f64).prop_map(|(r12, f13, s)| {
        let r13 = r12 * f13;
        PairRadii { r12, r13, r23: (r12 - r13) + s * 2.0 * r13 }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn banach_interval_nests_in_minkowski(r in valid_pairs()) {
        let [blo, bhi] = banach_range(&r).unwrap();
        let [mlo, mhi] = minkowski_range(&r);
        let eps = 1e-12 * (1.0 + r.max());
        prop_assert!(blo <= bhi);
        prop_assert!(mlo - eps <= blo && bhi <= mhi + eps);
    }

    #[test]
    fn quadratic_form_positive_via_decomposition(r in interior_pairs()) {
        let terms = psd_terms(r.r12, r.r13, r.r23);
        prop_assert!(terms.iter().all(|&t| t >= -1e-12 * r.max().powi(2)));
        prop_assert!(terms.iter().any(|&t| t > 0.0));
        prop_assert!(r.quadratic_form() > 0.0);
    }

    #[test]
    fn placement_consistent_with_bound(r in valid_pairs()) {
        let p = optimal_placement(&r).unwrap();
        let hi = banach_range(&r).unwrap()[1];
        prop_assert!((p.achieved_radius() - hi).abs() <= 1e-12 * hi.max(1.0) * 4.0);
        for t in [p.t1, p.t2, p.t3] {
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t));
        }
        prop_assert!(p.lambda >= -1e-12);
    }

    #[test]
    fn t_lambda_holds_on_domain(a in 0.1..5.0f64, ratio in 1.0..6.0f64, s in 0.0..=1.0f64) {
        let b = a * ratio;
        let (lo, hi) = (1.0 / a - 1.0 / b, 1.0 / a + 1.0 / b);
        let inv_c = lo + s * (hi - lo);
        prop_assume!(inv_c > 0.0);
        prop_assert!(check_t_lambda(a, b, 1.0 / inv_c).unwrap());
    }

    #[test]
    fn identity_residual_vanishes(x in -100.0..100.0f64, y in -100.0..100.0f64, z in -100.0..100.0f64) {
        let scale = x.abs().max(y.abs()).max(z.abs()).max(1.0);
        prop_assert!(psd_identity_residual(x, y, z).abs() <= 1e-9 * scale.powi(3));
    }

    #[test]
    fn decision_scale_invariant(r in valid_pairs(), frac in 0.0..=1.2f64, t in 0.01..100.0f64) {
        let [lo, hi] = banach_range(&r).unwrap();
        let d123 = lo + frac * (hi - lo);
        let d = ThreePointDiversity::new(r.r12, r.r13, r.r23, d123).unwrap();
        let dt = ThreePointDiversity::new(r.r12 * t, r.r13 * t, r.r23 * t, d123 * t).unwrap();
        prop_assert_eq!(decide(&d).banach, decide(&dt).banach);
        let h = hexagon_witness(&r).unwrap().body;
        let ht = hexagon_witness(&r.scaled(t)).unwrap().body;
        for (g, gt) in h.generators().iter().zip(ht.generators()) {
            prop_assert!(gt.approx_eq(&g.scale(1.0 / t), 1e-12 * g.max_abs()));
        }
    }

    #[test]
    fn decide_accepts_exactly_the_interval(r in valid_pairs(), frac in -0.5..1.5f64) {
        let [lo, hi] = banach_range(&r).unwrap();
        let d123 = lo + frac * (hi - lo).max(0.1 * lo);
        prop_assume!(d123 > 0.0);
        let decision = decide(&ThreePointDiversity::new(r.r12, r.r13, r.r23, d123).unwrap());
        let eps = 1e-9 * (1.0 + d123.max(r.max()));
        prop_assert_eq!(decision.banach, d123 >= lo - eps && d123 <= hi + eps);
        if decision.banach {
            prop_assert!(decision.minkowski);
        }
    }
}

/// `Q = (R12 R34)^2 + (R13 R24)^2 + (R14 R23)^2 - 2(R12 R13 R24 R34 + R12 R14 R23 R34 + R13 R14 R23 R24)`,
/// the common denominator of the exact face-system solution.
fn exact_denominator(r: &FourPointRadii) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.as_array();
    let (u, v, w) = (r12 * r34, r13 * r24, r14 * r23);
    u * u + v * v + w * w - 2.0 * (u * v + u * w + v * w)
}

/// Exact `a` of the face system, from a symbolic elimination.
fn exact_a(r: &FourPointRadii) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.as_array();
    let n = r12 * r13 * r34 + r12 * r14 * r34 - r12 * r34 * r34 - r13 * r13 * r24 + r13 * r14 * r23 + r13 * r14 * r24
        - 2.0 * r13 * r14 * r34
        + r13 * r24 * r34
        - r14 * r14 * r23
        + r14 * r23 * r34;
    -r24 * n / exact_denominator(r)
}

/// Exact `λ` of the face system, from the same elimination.
fn exact_lambda(r: &FourPointRadii) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.as_array();
    let n = r12 * r12 * r34 + r12 * r13 * r23 - r12 * r13 * r24 - r12 * r13 * r34 - r12 * r14 * r23 + r12 * r14 * r24
        - r12 * r14 * r34
        - r12 * r23 * r34
        - r12 * r24 * r34
        + r12 * r34 * r34
        + r13 * r13 * r24
        - r13 * r14 * r23
        - r13 * r14 * r24
        + r13 * r14 * r34
        - r13 * r23 * r24
        + r13 * r24 * r24
        - r13 * r24 * r34
        + r14 * r14 * r23
        + r14 * r23 * r23
        - r14 * r23 * r24
        - r14 * r23 * r34
        + r23 * r24 * r34;
    n / exact_denominator(r)
}

#[test]
fn exact_solution_at_unit_radii() {
    let r = FourPointRadii::uniform(1.0).unwrap();
    assert_eq!(exact_denominator(&r), -3.0);
    assert!((exact_a(&r) - 1.0 / 3.0).abs() < 1e-15);
    assert!((exact_lambda(&r) - 2.0 / 3.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn face_system_matches_exact_elimination(seed in any::<u64>()) {
        let r = sample_radii(&mut sampling::rng(seed));
        let s = solve_face_system(&r).unwrap();
        prop_assert!((s.a() - exact_a(&r)).abs() <= 1e-9 * exact_a(&r).abs().max(1.0));
        prop_assert!((s.lambda - exact_lambda(&r)).abs() <= 1e-9 * exact_lambda(&r).abs().max(1.0));
    }

    #[test]
    fn hexagon_attains_bound(r in valid_pairs()) {
        let body = hexagon_witness(&r).unwrap().body;
        let m = measure_triangle(&reference_triangle(), &body).unwrap();
        let hi = banach_range(&r).unwrap()[1];
        prop_assert!((m[0] - r.r12).abs() <= 1e-7 * r.r12);
        prop_assert!((m[1] - r.r13).abs() <= 1e-7 * r.r12);
        prop_assert!((m[2] - r.r23).abs() <= 1e-7 * r.r12);
        prop_assert!((m[3] - hi).abs() <= 1e-6 * hi);
    }

    #[test]
    fn witness_round_trip(r in valid_pairs(), frac in 0.0..=1.0f64) {
        let [lo, hi] = banach_range(&r).unwrap();
        let target = lo + frac * (hi - lo);
        let w = witness_for_target(&r, target).unwrap();
        let m = measure_triangle(&reference_triangle(), &w.body).unwrap();
        for (got, want) in m.iter().zip([r.r12, r.r13, r.r23, target]) {
            prop_assert!((got - want).abs() <= 1e-6, "{:?} vs {:?}", m, (r, target));
        }
    }

    #[test]
    fn embedding_in_original_labels(d12 in 0.5..3.0f64, d13 in 0.5..3.0f64, s in 0.0..=1.0f64, frac in 0.0..=1.0f64) {
        let (lo23, hi23) = ((d12 - d13).abs().max(0.05), d12 + d13);
        let d23 = lo23 + s * (hi23 - lo23);
        let (r, _) = PairRadii::canonical(d12, d13, d23);
        let [lo, hi] = banach_range(&r).unwrap();
        let d = ThreePointDiversity::new(d12, d13, d23, lo + frac * (hi - lo)).unwrap();
        let e = embed(&d).unwrap();
        let m = measure_triangle(&e.points, &e.body).unwrap();
        for (got, want) in m.iter().zip([d12, d13, d23, d.d123]) {
            prop_assert!((got - want).abs() <= 1e-6);
        }
    }

    #[test]
    fn face_system_residual_and_oracle(seed in any::<u64>()) {
        let r = sample_radii(&mut sampling::rng(seed));
        let s = solve_face_system(&r).unwrap();
        prop_assert!(s.residual <= 1e-10 * (1.0 + s.lambda.abs()));
        let t = conjecture_trial(&r).unwrap();
        if let Some(gap) = t.lambda_gap {
            prop_assert!(gap <= 1e-6, "{:?}", t);
        }
        // Triple radii never exceed the four-point radius.
        prop_assert!(t.lower <= t.measured_r1234 + 1e-9);
        for (b, m) in triple_bounds(&r).unwrap().iter().zip(t.triple_radii) {
            prop_assert!(m <= b.hi + 1e-7 * (1.0 + b.hi));
        }
    }

    #[test]
    fn four_point_homogeneity(seed in any::<u64>(), t in 0.2..5.0f64) {
        let r = sample_radii(&mut sampling::rng(seed));
        let rt = r.scaled(t).unwrap();
        let (s, st) = (solve_face_system(&r).unwrap(), solve_face_system(&rt).unwrap());
        prop_assert!((st.lambda * t - s.lambda).abs() <= 1e-10 * s.lambda.abs().max(1.0));
        for (u, v) in s.coeffs.iter().zip(&st.coeffs) {
            prop_assert!((u - v).abs() <= 1e-8 * u.abs().max(1.0));
        }
        if let (Ok(a), Ok(at)) = (coefficient_a(&r), coefficient_a(&rt)) {
            prop_assert!((a - at).abs() <= 1e-9 * a.abs().max(1.0));
        }
        if let (Ok(b), Ok(bt)) = (r1234_bound(&r), r1234_bound(&rt)) {
            prop_assert!((bt - t * b).abs() <= 1e-9 * (t * b).abs().max(1.0));
        }
    }

    #[test]
    fn larger_radius_never_lifts_lower_bound_past_measured(seed in any::<u64>(), which in 0usize..6, grow in 1.0..1.5f64) {
        let r = sample_radii(&mut sampling::rng(seed));
        let mut v = r.as_array();
        v[which] *= grow;
        let rg = FourPointRadii::new(v).unwrap();
        let body = bdiv::embed4::generators_from_radii(&rg).unwrap();
        let p = bdiv::embed4::simplex_points();
        let measured = circumradius_value(&p, &body).unwrap();
        for t in bdiv::embed4::TRIPLES {
            let sub = t.map(|i| p[i].clone());
            prop_assert!(circumradius_value(&sub, &body).unwrap() <= measured + 1e-9);
        }
    }
}
