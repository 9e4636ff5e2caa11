mod common;

use bethe_qsl::awop::{aw_d, phi_poly, QParam};
use bethe_qsl::poly::multiset_distance;
use bethe_qsl::qsl::XxzParams;
use bethe_qsl::singular::{indicial_exponents, indicial_function, ophi_basis, rho_basis};
use bethe_qsl::{Poly, C64};
use common::*;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn draw(r: &mut ChaCha8Rng, n_half: usize) -> XxzParams {
    let q = QParam::real(r.gen_range(0.2..0.8)).unwrap();
    let a = (0..2 * n_half)
        .map(|_| C64::from_polar(r.gen_range(0.2..1.0), r.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    XxzParams::from_a(q, a).unwrap()
}

#[test]
fn closed_form_example() {
    let q = QParam::real(0.4).unwrap();
    let p = XxzParams::from_a(q, [0.3, 0.4, 0.5, 0.6].map(c).to_vec()).unwrap();
    let r = indicial_exponents(&p, 0).unwrap();
    let expect = [1.0, 0.4 / 0.12, 0.4 / 0.15, 0.4 / 0.18].map(c);
    assert!(multiset_distance(&r.exponents, &expect) < 1e-12);
    assert!(r.residual.iter().all(|v| v.norm() < 1e-10));
    assert!(r.complete);
    assert_eq!(r.base_point_index, 0);
}

#[test]
fn random_draws_have_vanishing_residuals() {
    let mut r = rng(61);
    for _ in 0..20 {
        let n_half = r.gen_range(2..=3);
        let p = draw(&mut r, n_half);
        let pivot = r.gen_range(0..2 * n_half);
        let res = indicial_exponents(&p, pivot).unwrap();
        assert_eq!(res.exponents.len(), 2 * n_half);
        assert!(res.complete);
        let ap = p.a[pivot];
        for (j, &aj) in p.a.iter().enumerate().filter(|&(j, _)| j != pivot) {
            let t = p.q.q() / (ap * aj);
            assert!(
                res.exponents.iter().any(|e| (e - t).norm() < 1e-12 * t.norm()),
                "j = {j}"
            );
        }
        for v in &res.residual {
            assert!(v.norm() < 1e-9);
        }
    }
}

#[test]
fn no_other_roots_for_small_parameters() {
    let mut r = rng(62);
    for _ in 0..10 {
        let p = draw(&mut r, 2);
        let exps = indicial_exponents(&p, 0).unwrap().exponents;
        let scale = exps.iter().map(|e| e.norm()).fold(1.0, f64::max);
        let mut tested = 0;
        while tested < 50 {
            let t = C64::from_polar(r.gen_range(0.05..2.0 * scale), r.gen_range(0.0..std::f64::consts::TAU));
            if exps.iter().any(|e| (e - t).norm() < 0.05 * scale) {
                continue;
            }
            assert!(indicial_function(t, &p, 0).unwrap().norm() > 1e-8);
            tested += 1;
        }
    }
}

#[test]
fn argument_checks() {
    let p = XxzParams::from_a(QParam::real(0.4).unwrap(), vec![c(0.3); 4]).unwrap();
    assert!(indicial_function(c(0.0), &p, 0).is_err());
    assert!(indicial_function(c(0.5), &p, 4).is_err());
    assert!(indicial_exponents(&p, 7).is_err());
    let big = XxzParams::from_a(QParam::real(0.4).unwrap(), vec![c(0.3), c(1.5), c(0.2), c(0.1)]).unwrap();
    assert!(!indicial_exponents(&big, 0).unwrap().complete);
}

#[test]
fn pivot_permutation_equivariance() {
    let mut r = rng(63);
    let p = draw(&mut r, 3);
    let perm = [3, 0, 5, 1, 4, 2];
    let permuted = XxzParams::from_a(p.q, perm.iter().map(|&k| p.a[k]).collect()).unwrap();
    for (new_index, &old_index) in perm.iter().enumerate() {
        let a = indicial_exponents(&p, old_index).unwrap().exponents;
        let b = indicial_exponents(&permuted, new_index).unwrap().exponents;
        assert!(multiset_distance(&a, &b) < 1e-12);
    }
}

#[test]
fn phi_basis_vanishes_at_its_base_point() {
    let q = QParam::real(0.5).unwrap();
    let a = C64::new(0.4, 0.3);
    let zeta = (a + 1.0 / a) * 0.5;
    assert!((phi_poly(0, a, &q).eval(zeta) - 1.0).norm() < 1e-15);
    for n in 1..6 {
        assert!(phi_poly(n, a, &q).eval(zeta).norm() < 1e-12);
    }
}

#[test]
fn basis_ladders() {
    let q = QParam::new(C64::new(0.45, 0.1)).unwrap();
    assert_eq!(rho_basis(0, q.q()), Poly::one());
    assert_eq!(ophi_basis(0, &q).unwrap(), Poly::one());
    for n in 1..=6 {
        let qn = q.q().powu(n as u32);
        let ratio = (1.0 - qn) / (1.0 - q.q());
        let rho = aw_d(&rho_basis(n, q.q()), &q).unwrap();
        let expect = rho_basis(n - 1, q.q()).scale(2.0 * q.half().powi(1 - n as i32) * ratio);
        assert!(rel_diff(&rho, &expect) < 1e-10, "rho, n = {n}");
        let ophi = aw_d(&ophi_basis(n, &q).unwrap(), &q).unwrap();
        let expect = ophi_basis(n - 1, &q).unwrap().scale(-2.0 * q.quarter() * ratio);
        assert!(rel_diff(&ophi, &expect) < 1e-10, "ophi, n = {n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unit_exponent_always_vanishes(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let n_half = r.gen_range(2..=4);
        let p = draw(&mut r, n_half);
        let pivot = r.gen_range(0..2 * n_half);
        prop_assert_eq!(indicial_function(c(1.0), &p, pivot).unwrap(), c(0.0));
    }
}
