//! Bethe Ansatz equations for XXZ and XXX spin chains treated as polynomial
//! eigenproblems of second-order Askey-Wilson and Wilson difference operators.
//!
//! The crate builds the operator coefficients from spin parameters, solves for
//! polynomial eigenfunctions, reads Bethe roots off their zeros, and checks the
//! roots against the Bethe equations evaluated directly.
// negated comparisons are how NaN is made to fail a check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod awop;
pub mod bethe;
pub mod cli;
pub mod error;
pub mod heine;
pub mod poly;
pub mod qsl;
pub mod singular;
pub mod trig;
pub mod weights;
pub mod wilson;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use poly::{ChebKind, ComplexRootSet, LaurentPoly, Poly};

/// `C64::new(re, 0.0)`.
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
