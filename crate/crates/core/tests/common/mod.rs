#![allow(dead_code)]

use bethe_qsl::{Poly, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_c(r: &mut ChaCha8Rng, scale: f64) -> C64 {
    C64::new(r.gen_range(-scale..scale), r.gen_range(-scale..scale))
}

pub fn rand_poly(r: &mut ChaCha8Rng, degree: usize) -> Poly {
    Poly::raw((0..=degree).map(|_| rand_c(r, 1.0)).collect())
}

/// Largest coefficient difference relative to the larger operand.
pub fn rel_diff(a: &Poly, b: &Poly) -> f64 {
    (a - b).max_abs() / a.max_abs().max(b.max_abs()).max(1e-300)
}

pub fn complex(scale: f64) -> impl Strategy<Value = C64> {
    (-scale..scale, -scale..scale).prop_map(|(a, b)| C64::new(a, b))
}

pub fn poly_strategy(max_degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(complex(1.0), 1..=max_degree + 1).prop_map(Poly::raw)
}
