//! q-shifted factorials, q-Gamma, complex log-Gamma and the weight functions
//! of the XXZ and XXX problems.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::awop::{self, Weight};
use crate::error::{Error, Result};
use crate::qsl::{self, XxzParams};
use crate::trig::ln_sin;

/// Truncation point for infinite products.
pub const TAIL_CUTOFF: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Length {
    Finite(usize),
    Infinite,
}

/// `(a; q)_n` with a bound on the relative truncation error (zero for finite `n`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QPochhammer {
    pub a: C64,
    pub q: C64,
    pub n: Length,
    pub value: C64,
    pub tail_bound: f64,
}

pub fn qpoch(a: C64, q: C64, n: Length) -> Result<QPochhammer> {
    match n {
        Length::Finite(n) => {
            let mut value = C64::new(1.0, 0.0);
            let mut aqk = a;
            for _ in 0..n {
                value *= 1.0 - aqk;
                aqk *= q;
            }
            Ok(QPochhammer {
                a,
                q,
                n: Length::Finite(n),
                value,
                tail_bound: 0.0,
            })
        }
        Length::Infinite => {
            let (ln, tail_bound, zero) = qpoch_inf_parts(a, q)?;
            Ok(QPochhammer {
                a,
                q,
                n,
                value: if zero { C64::new(0.0, 0.0) } else { ln.exp() },
                tail_bound,
            })
        }
    }
}

/// `ln (a; q)_∞` (any branch). Fails for `|q| >= 1` or an exactly vanishing factor.
pub fn qpoch_inf_ln(a: C64, q: C64) -> Result<C64> {
    let (ln, _, zero) = qpoch_inf_parts(a, q)?;
    if zero {
        return Err(Error::Domain(format!("(a; q)_inf vanishes at a = {a}")));
    }
    Ok(ln)
}

fn qpoch_inf_parts(a: C64, q: C64) -> Result<(C64, f64, bool)> {
    if q.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "infinite q-product needs |q| < 1, got |q| = {}",
            q.norm()
        )));
    }
    let mut ln = C64::new(0.0, 0.0);
    let mut aqk = a;
    let mut zero = false;
    let mut k = 0usize;
    while aqk.norm() >= TAIL_CUTOFF {
        let factor = 1.0 - aqk;
        if factor.norm() == 0.0 {
            zero = true;
        } else {
            ln += factor.ln();
        }
        aqk *= q;
        k += 1;
        if k > 50_000_000 {
            return Err(Error::Domain("infinite q-product did not reach the cutoff".into()));
        }
    }
    // |ln prod_{j>=K}(1 - a q^j)| <= sum |a q^j| / (1 - |a q^K|) <= |a q^K| / ((1 - |q|)(1 - |a q^K|))
    let r = aqk.norm();
    let tail = r / ((1.0 - q.norm()) * (1.0 - r));
    Ok((ln, tail * 1.01, zero))
}

/// `Γ_q(y) = (1-q)^{1-y} (q;q)_∞ / (q^y;q)_∞` for real `0 < q < 1`.
pub fn q_gamma(y: C64, q: f64) -> Result<C64> {
    Ok(ln_q_gamma(y, q)?.exp())
}

pub fn ln_q_gamma(y: C64, q: f64) -> Result<C64> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("q_gamma needs 0 < q < 1, got {q}")));
    }
    let qc = C64::new(q, 0.0);
    let qy = qc.powc(y);
    // poles: q^{y+k} = 1
    let mut qyk = qy;
    while qyk.norm() >= TAIL_CUTOFF {
        if (1.0 - qyk).norm() < 1e-10 {
            return Err(Error::GammaPole(y));
        }
        qyk *= q;
    }
    let lq = (1.0 - q).ln();
    Ok((1.0 - y) * lq + qpoch_inf_ln(qc, qc)? - qpoch_inf_ln(qy, qc)?)
}

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_8e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_6e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

/// `ln Γ(z)`; the real part is `ln |Γ(z)|`. Reflection is used for `Re z < 1/2`.
pub fn log_gamma(z: C64) -> Result<C64> {
    if z.re <= 0.0 && z.im.abs() < 1e-14 && (z.re - z.re.round()).abs() < 1e-14 {
        return Err(Error::GammaPole(z));
    }
    if z.re < 0.5 {
        let pi = C64::new(PI, 0.0);
        return Ok(pi.ln() - ln_sin(pi * z) - log_gamma(1.0 - z)?);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln())
}

/// Weight of the XXZ problem at `x = cos θ`.
///
/// `(e^{iNθ}, e^{-iNθ}; q^{N/2})_∞ / (sin(Nθ/2) ∏_j (a_j e^{iθ}, a_j e^{-iθ}; q)_∞)`,
/// with the removable zero of the numerator cancelled analytically.
pub fn xxz_weight(x: f64, params: &XxzParams) -> Result<C64> {
    xxz_weight_theta(x.acos(), params)
}

/// `θ` is first reduced to `[0, π]`, so the value depends on `cos θ` only.
pub fn xxz_weight_theta(theta: f64, params: &XxzParams) -> Result<C64> {
    let theta = principal_angle(theta);
    let q = real_q(params)?;
    let n = params.n_half() as f64;
    let z = C64::from_polar(1.0, theta);
    let p = C64::new(q.powf(n / 2.0), 0.0);
    let zn = C64::from_polar(1.0, n * theta);
    let num = qpoch_inf_ln(p * zn, p)? + qpoch_inf_ln(p / zn, p)?;
    let den = ln_denominator(z, params, q)?;
    Ok(4.0 * (0.5 * n * theta).sin() * (num - den).exp())
}

/// The three equivalent expressions of the XXZ weight, for cross-checking:
/// the defining quotient and the two one-sided forms.
pub fn xxz_weight_forms(theta: f64, params: &XxzParams) -> Result<[C64; 3]> {
    let theta = principal_angle(theta);
    let q = real_q(params)?;
    let n = params.n_half() as f64;
    let i = C64::i();
    let z = C64::from_polar(1.0, theta);
    let p = C64::new(q.powf(n / 2.0), 0.0);
    let zn = C64::from_polar(1.0, n * theta);
    let den = ln_denominator(z, params, q)?.exp();
    let defining = qpoch(zn, p, Length::Infinite)?.value * qpoch(1.0 / zn, p, Length::Infinite)?.value
        / ((0.5 * n * theta).sin() * den);
    let left = 2.0
        * i
        * (-0.5 * i * n * theta).exp()
        * qpoch(zn, p, Length::Infinite)?.value
        * qpoch(p / zn, p, Length::Infinite)?.value
        / den;
    let right = -2.0
        * i
        * (0.5 * i * n * theta).exp()
        * qpoch(p * zn, p, Length::Infinite)?.value
        * qpoch(1.0 / zn, p, Length::Infinite)?.value
        / den;
    Ok([defining, left, right])
}

fn principal_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        2.0 * PI - t
    } else {
        t
    }
}

fn real_q(params: &XxzParams) -> Result<f64> {
    let q = params.q.q();
    if q.im.abs() > 1e-15 || !(0.0 < q.re && q.re < 1.0) {
        return Err(Error::Domain(format!("xxz weight needs real 0 < q < 1, got {q}")));
    }
    Ok(q.re)
}

fn ln_denominator(z: C64, params: &XxzParams, q: f64) -> Result<C64> {
    let qc = C64::new(q, 0.0);
    let mut den = C64::new(0.0, 0.0);
    for &a in &params.a {
        den += qpoch_inf_ln(a * z, qc)? + qpoch_inf_ln(a / z, qc)?;
    }
    Ok(den)
}

/// The XXZ weight as a quadrature weight.
pub struct XxzWeight<'a>(pub &'a XxzParams);

impl Weight for XxzWeight<'_> {
    fn at(&self, x: f64) -> C64 {
        self.at_theta(x.acos())
    }
    fn at_theta(&self, theta: f64) -> C64 {
        xxz_weight_theta(theta, self.0).unwrap_or(C64::new(f64::NAN, f64::NAN))
    }
}

/// `|∏_l Γ(-s_l + iy) / Γ(iNy)|²` with `N = len(s)/2`.
pub fn xxx_weight(y: f64, s: &[f64]) -> Result<f64> {
    if !s.len().is_multiple_of(2) || s.is_empty() {
        return Err(Error::Domain("xxx weight needs an even, nonempty spin list".into()));
    }
    let n = (s.len() / 2) as f64;
    let mut ln = -log_gamma(C64::new(0.0, n * y))?.re;
    for &sl in s {
        ln += log_gamma(C64::new(-sl, y))?.re;
    }
    Ok((2.0 * ln).exp())
}

/// Elementary form of the spin-½ ground-state weight for chain length `L`
/// (`x = y²`), where the Gamma products reduce to hyperbolic functions.
pub fn xxx_half_spin_weight(l: usize, y: f64) -> Result<f64> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(Error::Domain(format!("chain length must be even and >= 2, got {l}")));
    }
    let lf = l as f64;
    let x = y * y;
    let base = (x + 0.25).powi(l as i32) * (PI * y).cosh().powi(l as i32);
    Ok(if l % 4 == 2 {
        let k = lf / 2.0 + 1.0;
        k * PI.powi(l as i32 + 1) * y * (k * PI * y).sinh() / (base * (PI * y).sinh().powi(2))
    } else {
        let k = lf / 2.0;
        k * PI.powi(l as i32 - 1) * y * (k * PI * y).sinh() / base
    })
}

/// Normalised Gram matrix `|<p_m, p_n>_w| / sqrt(<p_m,p_m><p_n,p_n>)` of the
/// monic Askey-Wilson polynomials under the XXZ weight (`N = 2`).
pub fn orthogonality_check(params: &XxzParams, maxdeg: usize) -> Result<Vec<Vec<f64>>> {
    let q = real_q(params)?;
    if params.a.len() != 4 {
        return Err(Error::Degree("orthogonality check needs N = 2".into()));
    }
    let a = [params.a[0], params.a[1], params.a[2], params.a[3]];
    let polys = (0..=maxdeg)
        .map(|k| qsl::aw_poly_a(k, &a, C64::new(q, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let w = XxzWeight(params);
    let mut gram = vec![vec![C64::new(0.0, 0.0); maxdeg + 1]; maxdeg + 1];
    for m in 0..=maxdeg {
        for k in m..=maxdeg {
            let v = awop::weighted_inner_product(&polys[m], &polys[k], &w)?;
            gram[m][k] = v;
            gram[k][m] = v.conj();
        }
    }
    Ok((0..=maxdeg)
        .map(|m| {
            (0..=maxdeg)
                .map(|k| gram[m][k].norm() / (gram[m][m].norm() * gram[k][k].norm()).sqrt())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn qpoch_examples() {
        let a = C64::new(0.3, -0.2);
        let q = c(0.6);
        assert_eq!(qpoch(a, q, Length::Finite(0)).unwrap().value, c(1.0));
        assert_eq!(qpoch(a, q, Length::Finite(1)).unwrap().value, 1.0 - a);
        let inf = qpoch(c(0.5), c(0.5), Length::Infinite).unwrap();
        let mut direct = c(1.0);
        for k in 0..60 {
            direct *= 1.0 - 0.5f64.powi(k + 1);
        }
        assert!((inf.value - direct).norm() < 1e-14);
        assert!(inf.tail_bound < 1e-15);
        assert!(qpoch(a, c(1.0), Length::Infinite).is_err());
    }

    #[test]
    fn qpoch_step_is_exact() {
        let a = C64::new(0.7, 0.1);
        let q = C64::new(0.4, 0.3);
        let mut aqn = a;
        for n in 0..10 {
            let lhs = qpoch(a, q, Length::Finite(n + 1)).unwrap().value;
            let rhs = qpoch(a, q, Length::Finite(n)).unwrap().value * (1.0 - aqn);
            assert_eq!(lhs, rhs);
            aqn *= q;
        }
    }

    #[test]
    fn q_gamma_examples() {
        assert!((q_gamma(c(1.0), 0.3).unwrap() - 1.0).norm() < 1e-14);
        assert!((q_gamma(c(2.0), 0.3).unwrap() - 1.0).norm() < 1e-14);
        let g = q_gamma(c(2.5), 0.9999).unwrap();
        let exact = log_gamma(c(2.5)).unwrap().exp();
        assert!((g / exact - 1.0).norm() < 0.05);
        assert!(matches!(q_gamma(c(-2.0), 0.5), Err(Error::GammaPole(_))));
    }

    #[test]
    fn q_gamma_functional_equation() {
        for &(y, q) in &[(0.7, 0.5), (1.3, 0.8), (2.2, 0.3)] {
            let y = c(y);
            let lhs = q_gamma(y + 1.0, q).unwrap();
            let rhs = (1.0 - c(q).powc(y)) / (1.0 - q) * q_gamma(y, q).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn log_gamma_examples() {
        assert!(log_gamma(c(1.0)).unwrap().norm() < 1e-14);
        assert!((log_gamma(c(5.0)).unwrap() - 24f64.ln()).norm() < 1e-13);
        assert!((log_gamma(c(0.5)).unwrap().re - 0.5 * PI.ln()).abs() < 1e-13);
        let y = 0.7;
        let lhs = (2.0 * log_gamma(C64::new(0.0, y)).unwrap().re).exp();
        assert!((lhs / (PI / (y * (PI * y).sinh())) - 1.0).abs() < 1e-10);
        let y = 0.3;
        let lhs = (2.0 * log_gamma(C64::new(-0.5, y)).unwrap().re).exp();
        let rhs = 4.0 * PI / ((4.0 * y * y + 1.0) * (PI * y).cosh());
        assert!((lhs / rhs - 1.0).abs() < 1e-10);
        assert!(log_gamma(c(-3.0)).is_err());
        assert!(log_gamma(c(0.0)).is_err());
    }

    #[test]
    fn log_gamma_matches_recurrence_off_axis() {
        for z in [C64::new(0.3, 2.0), C64::new(3.5, -1.2), C64::new(-2.4, 0.7)] {
            let lhs = log_gamma(z + 1.0).unwrap().exp();
            let rhs = z * log_gamma(z).unwrap().exp();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm(), "{z}");
        }
    }
}
