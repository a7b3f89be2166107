//! Closed forms for the four-point face system as they are printed, kept
//! verbatim so they can be compared against the solved system.
//!
//! Each function is split into the physical lines of the printed display;
//! the comments name the line a group of terms comes from. Known results of
//! that comparison: the printed `a` is 3 at all radii 1, where the system
//! gives 1/3, and the printed bound has a vanishing denominator there.

use super::FourPointRadii;
use crate::error::{Error, Result};

/// Relative size below which a printed denominator counts as zero.
const ZERO_DENOMINATOR: f64 = 1e-12;

fn vanishes(value: f64, r: &FourPointRadii, degree: i32) -> bool {
    value.abs() <= ZERO_DENOMINATOR * r.max().powi(degree)
}

/// Numerator of the printed coefficient `a`.
fn a_numerator(r: &FourPointRadii) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.as_array();
    // line 1
    let line1 = r12 * r14 * r24 * r34 * r34
        - (r12 * r13 * r13 + (r12 + r13) * r14 * r14 - (2.0 * r12 * r13 + r13 * r13) * r14) * r23 * r24;
    // line 2 and line 3 (the bracket opened on line 2 closes on line 3)
    let line2 = (r13 * r13 * r14 - r13 * r14 * r14) * r24 * r24;
    let inner = r12 * r12 * r13 + r12 * r13 * r13 - r13 * r14 * r14
        // line 3
        + r14 * r14 * r23
        - (r12 * r12 + 3.0 * r12 * r13 + r13 * r13) * r14;
    let line23 = -(r13 * r14 * r24 * r24 - inner * r24) * r34;
    line1 + line2 + line23
}

/// Denominator of the printed coefficient `a`; twice it is the numerator of
/// the printed bound.
fn a_denominator(r: &FourPointRadii) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.as_array();
    // line 3 (after the division bar)
    let first = r13 * r13 * r14 * r24 * r24 + r12 * r12 * r14 * r34 * r34;
    // line 4
    let second = (r12 * r13 * r14 - (r12 + r13) * r14 * r14) * r23 * r23
        - (r12 * r13 * r13 + r13 * r14 * r14 - (r12 * r13 + r13 * r13) * r14) * r23 * r24;
    // line 5
    let third = -(2.0 * r12 * r13 * r14 * r24
        - (r12 * r12 * r13 + r12 * r14 * r14 - (r12 * r12 + r12 * r13) * r14) * r23)
        * r34;
    first + second + third
}

/// Denominator of the printed bound on `R1234`.
fn bound_denominator(r: &FourPointRadii) -> f64 {
    let [r12, r13, r14, r23, r24, r34] = r.as_array();
    // line 3 (after the division bar)
    let t1 = 2.0 * r13 * r14 * r24 * r24;
    // line 4, continued on line 5
    let t2 = (r12 * r13 - (r12 + r13) * r14 - r14 * r14) * r23 * r23;
    let t3 = (r12 * r12 * r13 - r12 * r13 * r13 - (r12 + r13) * r14 * r14
        // line 5
        - (r12 * r12 - 2.0 * r12 * r13 - r13 * r13) * r14)
        * r23;
    // line 5 to line 7
    let t4 = -(r12 * r12 * r13
        // line 6
        + r12 * r13 * r13
        - (r12 - r13) * r14 * r14
        - (r12 * r12 + r13 * r13) * r14
        + (r12 * r13 - (r12 + r13) * r14
            // line 7
            + r14 * r14)
            * r23)
        * r24;
    // line 7 to line 8
    let t5 = (r12 * r12 * r13 + r12 * r13 * r13 + (r12 - r13) * r14 * r14 - 2.0 * r12 * r14 * r24
        // line 8
        + (r12 * r12 - 2.0 * r12 * r13 - r13 * r13) * r14
        - (r12 * r13 - (r12 + r13) * r14 - r14 * r14) * r23)
        * r34;
    t1 + t2 + t3 + t4 + t5
}

/// The printed closed form of the face-system coefficient `a`.
pub fn coefficient_a(r: &FourPointRadii) -> Result<f64> {
    let den = a_denominator(r);
    if vanishes(den, r, 5) {
        return Err(Error::ZeroDenominator("coefficient_a"));
    }
    Ok(a_numerator(r) / den)
}

/// The printed upper bound on `R1234`.
pub fn r1234_bound(r: &FourPointRadii) -> Result<f64> {
    let den = bound_denominator(r);
    if vanishes(den, r, 4) {
        return Err(Error::ZeroDenominator("r1234_bound"));
    }
    Ok(2.0 * a_denominator(r) / den)
}
