mod common;

use bethe_qsl::poly::{self, elem_sym, multiset_distance, LaurentPoly};
use bethe_qsl::{ChebKind, Error, Poly, C64};
use common::*;
use proptest::prelude::*;

#[test]
fn chebyshev_decompositions() {
    let t = Poly::from_real(&[-1.0, 0.0, 2.0]).cheb_decompose(ChebKind::First);
    assert!((t[0]).norm() < 1e-15 && (t[1]).norm() < 1e-15 && (t[2] - c(1.0)).norm() < 1e-15);
    let u = Poly::from_real(&[0.0, 2.0]).cheb_decompose(ChebKind::Second);
    assert!(u[0].norm() < 1e-15 && (u[1] - c(1.0)).norm() < 1e-15);
}

#[test]
fn chebyshev_pointwise_reconstruction() {
    let mut r = rng(11);
    let f = rand_poly(&mut r, 10);
    for kind in [ChebKind::First, ChebKind::Second] {
        let coeffs = f.cheb_decompose(kind);
        for k in 0..20 {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / 20.0;
            let t = x.acos();
            let direct: C64 = coeffs
                .iter()
                .enumerate()
                .map(|(n, &cn)| {
                    let basis = match kind {
                        ChebKind::First => (n as f64 * t).cos(),
                        ChebKind::Second => ((n as f64 + 1.0) * t).sin() / t.sin(),
                    };
                    cn * basis
                })
                .sum();
            assert!((direct - f.eval_real(x)).norm() < 1e-12 * f.max_abs());
        }
    }
}

#[test]
fn chebyshev_roundtrip_degree_32() {
    let mut r = rng(12);
    let f = rand_poly(&mut r, 32);
    let back = Poly::from_cheb(&f.cheb_decompose(ChebKind::First), ChebKind::First);
    assert!(rel_diff(&f, &back) < 1e-12);
}

#[test]
fn root_examples() {
    let r = Poly::from_real(&[-1.0, 0.0, 1.0]).roots().unwrap();
    assert!((r.roots[0] + 1.0).norm() < 1e-14 && (r.roots[1] - 1.0).norm() < 1e-14);
    let cube = Poly::from_real(&[0.0, 0.0, 0.0, 1.0]).roots().unwrap();
    assert_eq!(cube.roots, vec![c(0.0); 3]);
    let f = Poly::from_roots(&[c(0.3), c(0.7), c(-0.2)], c(1.0)).unwrap();
    let got = f.roots().unwrap().roots;
    assert!(multiset_distance(&got, &[c(-0.2), c(0.3), c(0.7)]) < 1e-10);
    assert!(matches!(Poly::constant(c(2.0)).roots(), Err(Error::ConstantPolynomial)));
}

#[test]
fn roots_are_sorted_and_within_tolerance() {
    let mut r = rng(13);
    let f = rand_poly(&mut r, 9);
    let set = f.roots().unwrap();
    for w in set.roots.windows(2) {
        assert!(w[0].re < w[1].re || (w[0].re == w[1].re && w[0].im <= w[1].im));
    }
    for &z in &set.roots {
        assert!(f.eval(z).norm() <= set.tolerance * f.max_abs() * (1.0 + 1e-12));
    }
}

#[test]
fn from_roots_examples() {
    assert_eq!(
        Poly::from_roots(&[c(1.0)], c(1.0)).unwrap(),
        Poly::from_real(&[-1.0, 1.0])
    );
    assert_eq!(Poly::from_roots(&[], c(3.0)).unwrap(), Poly::constant(c(3.0)));
    assert!(Poly::from_roots(&[c(1.0)], c(0.0)).is_err());
}

#[test]
fn elem_sym_examples() {
    let (a, b) = (C64::new(0.3, 1.0), C64::new(-2.0, 0.5));
    let e = elem_sym(&[a, b]);
    assert_eq!(e.len(), 3);
    assert!((e[0] - 1.0).norm() < 1e-15 && (e[1] - (a + b)).norm() < 1e-15 && (e[2] - a * b).norm() < 1e-15);
    assert_eq!(elem_sym(&[]), vec![c(1.0)]);
}

#[test]
fn elem_sym_matches_expanded_product() {
    let mut r = rng(14);
    let v: Vec<C64> = (0..6).map(|_| rand_c(&mut r, 1.0)).collect();
    let e = elem_sym(&v);
    let p = Poly::from_roots(&v, c(1.0)).unwrap();
    for (k, ek) in e.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        assert!((p.coeff(6 - k) - sign * ek).norm() < 1e-13);
    }
}

#[test]
fn laurent_symmetric_roundtrip() {
    let mut r = rng(15);
    let f = rand_poly(&mut r, 7);
    let l = f.to_laurent();
    assert!(l.is_symmetric(1e-14));
    assert!(rel_diff(&l.to_poly(), &f) < 1e-13);
    let s = l.substitute_scaled(C64::new(0.0, 2.0));
    for (k, v) in l.terms() {
        assert!((s.coeff(k) - v * C64::new(0.0, 2.0).powi(k)).norm() < 1e-12 * v.norm().max(1.0));
    }
}

#[test]
fn laurent_division_by_z_minus_inverse() {
    let l = LaurentPoly::from_terms(&[(-2, c(-1.0)), (2, c(1.0))]);
    let q = l.div_z_minus_inv().unwrap();
    // (z² - z⁻²) / (z - z⁻¹) = z + z⁻¹
    assert!((q.coeff(1) - 1.0).norm() < 1e-15 && (q.coeff(-1) - 1.0).norm() < 1e-15);
    assert!(LaurentPoly::from_terms(&[(0, c(1.0))]).div_z_minus_inv().is_err());
}

#[test]
fn collisions_mark_both_partners() {
    let flags = poly::collisions(&[c(0.0), c(1e-5), c(0.5)], 1e-3);
    assert_eq!(flags, vec![true, true, false]);
}

fn separated_roots(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(1.0), n).prop_filter("separated", |v| {
        v.iter()
            .enumerate()
            .all(|(i, a)| v[i + 1..].iter().all(|b| (a - b).norm() > 0.1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_roundtrip(roots in (1usize..=12).prop_flat_map(separated_roots)) {
        let f = Poly::from_roots(&roots, c(1.0)).unwrap();
        let got = f.roots().unwrap().roots;
        prop_assert!(multiset_distance(&got, &roots) < 1e-8);
    }

    #[test]
    fn cheb_decompose_is_linear(f in poly_strategy(10), g in poly_strategy(10), a in complex(2.0), b in complex(2.0)) {
        for kind in [ChebKind::First, ChebKind::Second] {
            let lhs = (&f.scale(a) + &g.scale(b)).cheb_decompose(kind);
            let fd = f.cheb_decompose(kind);
            let gd = g.cheb_decompose(kind);
            for (k, v) in lhs.iter().enumerate() {
                let fk = fd.get(k).copied().unwrap_or_default();
                let gk = gd.get(k).copied().unwrap_or_default();
                prop_assert!((v - (a * fk + b * gk)).norm() < 1e-12 * 8.0);
            }
        }
    }

    #[test]
    fn newton_identities(v in prop::collection::vec(complex(1.0), 0..=8)) {
        let e = elem_sym(&v);
        let m = v.len();
        let p = |k: u32| v.iter().map(|x| x.powu(k)).sum::<C64>();
        for k in 1..=m {
            let mut acc = C64::new(0.0, 0.0);
            for i in 1..=k {
                let sign = if (i - 1) % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * e[k - i] * p(i as u32);
            }
            prop_assert!((acc - e[k] * k as f64).norm() < 1e-10 * (1.0 + e[k].norm() * k as f64));
        }
    }

    #[test]
    fn trimming_after_arithmetic(f in poly_strategy(6)) {
        let z = &f - &f;
        prop_assert!(z.is_zero());
        let d = &(&f * &f) - &(&f * &f);
        prop_assert!(d.is_zero());
    }
}
