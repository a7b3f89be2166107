//! Diversities over finite sets and the circumradius functional for
//! centrally symmetric polytopes.
//!
//! The crate decides Banach-embeddability of three-point diversities, builds
//! planar witness bodies for every embeddable value, and explores the
//! four-point case numerically against an LP oracle.

pub mod circum;
pub mod diversity;
pub mod embed3;
pub mod embed4;
pub mod error;
pub mod geom;
pub mod linprog;
pub mod sampling;

pub use error::{Error, Result};
