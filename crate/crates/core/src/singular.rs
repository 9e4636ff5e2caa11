//! Local analysis at the points `ζ_j = (a_j + 1/a_j)/2`: the indicial
//! function, its roots, and two auxiliary polynomial bases with simple
//! images under `D_q`.
//!
//! Exponents are reported as `t = q^α` rather than `α` to avoid choosing a
//! branch of the logarithm. Series solutions beyond the leading coefficient
//! are not built.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::awop::{self, QParam};
use crate::error::{Error, Result};
use crate::poly::{LaurentPoly, Poly};
use crate::qsl::{build_pi_phi, XxzParams};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndicialResult {
    /// Zero-based index `j` of the expansion point `ζ_j`.
    pub base_point_index: usize,
    /// Values of `q^α`.
    pub exponents: Vec<C64>,
    /// Indicial function at each exponent.
    pub residual: Vec<C64>,
    /// True when every `|a_j| <= 1`, in which case the list is complete.
    pub complete: bool,
}

/// `(1 - t) Φ(x*; a')` where `a'` is `a` with `a_p` replaced by `a_p t / q`
/// and `x* = (a'_p + 1/a'_p)/2`.
///
/// Its vanishing is the condition for the coefficient of `φ_{α-1}(x; a_p)` to
/// drop out of `D_q(w D_q y)/w` when `y` is expanded around `ζ_p`.
pub fn indicial_function(t: C64, params: &XxzParams, pivot: usize) -> Result<C64> {
    if t.norm() == 0.0 {
        return Err(Error::Domain("indicial function needs t != 0".into()));
    }
    if pivot >= params.a.len() {
        return Err(Error::Domain(format!(
            "pivot {pivot} out of range for {} parameters",
            params.a.len()
        )));
    }
    let shifted = params.a[pivot] * t / params.q.q();
    let mut a = params.a.clone();
    a[pivot] = shifted;
    let moved = XxzParams::from_a(params.q, a)?;
    let (_, phi) = build_pi_phi(&moved);
    let x = (shifted + 1.0 / shifted) * 0.5;
    Ok((1.0 - t) * phi.eval(x))
}

/// The roots `t = 1` and `t = q/(a_p a_j)`, `j != p`, each checked against
/// [`indicial_function`].
pub fn indicial_exponents(params: &XxzParams, pivot: usize) -> Result<IndicialResult> {
    if pivot >= params.a.len() {
        return Err(Error::Domain(format!(
            "pivot {pivot} out of range for {} parameters",
            params.a.len()
        )));
    }
    let ap = params.a[pivot];
    if ap.norm() == 0.0 {
        return Err(Error::Domain("pivot parameter must be nonzero".into()));
    }
    let q = params.q.q();
    let mut exponents = vec![C64::new(1.0, 0.0)];
    for (j, &aj) in params.a.iter().enumerate() {
        if j != pivot && aj.norm() != 0.0 {
            exponents.push(q / (ap * aj));
        }
    }
    let residual = exponents
        .iter()
        .map(|&t| indicial_function(t, params, pivot))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndicialResult {
        base_point_index: pivot,
        exponents,
        residual,
        complete: params.a.iter().all(|a| a.norm() <= 1.0),
    })
}

/// `ρ_n(cos θ) = (1 + e^{2iθ}) (-q^{2-n} e^{2iθ}; q²)_{n-1} e^{-inθ}`, `ρ_0 = 1`.
pub fn rho_basis(n: usize, q: C64) -> Poly {
    if n == 0 {
        return Poly::one();
    }
    let one = C64::new(1.0, 0.0);
    let mut z = LaurentPoly::from_terms(&[(-(n as i32), one), (2 - n as i32, one)]);
    let mut c = q.powi(2 - n as i32);
    for _ in 0..n - 1 {
        z = &z * &LaurentPoly::from_terms(&[(0, one), (2, c)]);
        c *= q * q;
    }
    z.to_poly()
}

/// `ϕ_n(cos θ) = (q^{1/4} e^{iθ}, q^{1/4} e^{-iθ}; q^{1/2})_n`.
pub fn ophi_basis(n: usize, q: &QParam) -> Result<Poly> {
    let base = QParam::with_half(q.quarter())?;
    Ok(awop::phi_poly(n, q.quarter(), &base))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> XxzParams {
        let a = [0.3, 0.4, 0.5, 0.6].map(|v| C64::new(v, 0.0)).to_vec();
        XxzParams::from_a(QParam::real(0.4).unwrap(), a).unwrap()
    }

    #[test]
    fn exponents_vanish() {
        let r = indicial_exponents(&sample(), 0).unwrap();
        assert_eq!(r.exponents.len(), 4);
        assert!((r.exponents[1] - C64::new(0.4 / 0.12, 0.0)).norm() < 1e-12);
        for v in &r.residual {
            assert!(v.norm() < 1e-10, "{v}");
        }
        assert!(r.complete);
    }

    #[test]
    fn rho_low_degrees() {
        assert_eq!(rho_basis(0, C64::new(0.5, 0.0)), Poly::one());
        let r1 = rho_basis(1, C64::new(0.5, 0.0));
        assert!((&r1 - &Poly::from_real(&[0.0, 2.0])).max_abs() < 1e-15);
    }

    #[test]
    fn rho_ladder() {
        let qv = C64::new(0.45, 0.1);
        let q = QParam::new(qv).unwrap();
        for n in 1..6 {
            let lhs = awop::aw_d(&rho_basis(n, qv), &q).unwrap();
            let k = 2.0 * q.half().powi(1 - n as i32) * (1.0 - qv.powu(n as u32)) / (1.0 - qv);
            let rhs = rho_basis(n - 1, qv).scale(k);
            assert!((&lhs - &rhs).max_abs() < 1e-10 * rhs.max_abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn ophi_ladder() {
        let q = QParam::new(C64::new(0.45, 0.1)).unwrap();
        for n in 1..6 {
            let lhs = awop::aw_d(&ophi_basis(n, &q).unwrap(), &q).unwrap();
            let k = -2.0 * q.quarter() * (1.0 - q.q().powu(n as u32)) / (1.0 - q.q());
            let rhs = ophi_basis(n - 1, &q).unwrap().scale(k);
            assert!((&lhs - &rhs).max_abs() < 1e-10 * rhs.max_abs().max(1.0), "n={n}");
        }
    }
}
