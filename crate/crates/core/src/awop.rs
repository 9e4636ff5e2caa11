//! Askey-Wilson operator calculus on polynomials in `x = (z + 1/z)/2`.
//!
//! `eta_shift` substitutes `z -> q^{±1/2} z`, `aw_d` is the divided difference
//! `2 (η₊f - η₋f) / ((q^{1/2} - q^{-1/2})(z - 1/z))` and `aw_a` the average of
//! the two shifts. Both are evaluated exactly on Laurent coefficients.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::poly::{LaurentPoly, Poly};
use crate::weights;

/// The deformation parameter together with fixed square and fourth roots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QParam {
    q: C64,
    half: C64,
    quarter: C64,
    eta: Option<C64>,
}

impl QParam {
    /// Principal branches for `q^{1/2}` and `q^{1/4}`.
    pub fn new(q: C64) -> Result<Self> {
        if q.norm() == 0.0 || !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::Domain(format!("q must be finite and nonzero, got {q}")));
        }
        let half = q.sqrt();
        Ok(Self {
            q,
            half,
            quarter: half.sqrt(),
            eta: None,
        })
    }

    pub fn real(q: f64) -> Result<Self> {
        Self::new(C64::new(q, 0.0))
    }

    /// `q = e^{2iη}` with `q^{1/2} = e^{iη}` and `q^{1/4} = e^{iη/2}`.
    ///
    /// These roots can differ from the principal ones; with them the operator
    /// identities written in terms of `sin η` hold literally.
    pub fn from_eta(eta: C64) -> Self {
        let i = C64::i();
        Self {
            q: (2.0 * i * eta).exp(),
            half: (i * eta).exp(),
            quarter: (0.5 * i * eta).exp(),
            eta: Some(eta),
        }
    }

    /// Explicit choice of `q^{1/2}`; `q^{1/4}` is its principal root.
    pub fn with_half(half: C64) -> Result<Self> {
        let mut p = Self::new(half * half)?;
        p.half = half;
        p.quarter = half.sqrt();
        Ok(p)
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn half(&self) -> C64 {
        self.half
    }

    pub fn quarter(&self) -> C64 {
        self.quarter
    }

    pub fn eta(&self) -> Option<C64> {
        self.eta
    }

    /// `q -> 1/q` with all roots inverted.
    pub fn inverse(&self) -> Self {
        Self {
            q: 1.0 / self.q,
            half: 1.0 / self.half,
            quarter: 1.0 / self.quarter,
            eta: self.eta.map(|e| -e),
        }
    }

    /// `q^{1/2} - q^{-1/2}`.
    pub fn half_gap(&self) -> C64 {
        self.half - 1.0 / self.half
    }

    /// Fails when `q` lies within `tol` of a root of unity of order `<= max_order`.
    pub fn check_root_of_unity(&self, max_order: usize, tol: f64) -> Result<()> {
        let arg = self.q.arg();
        for order in 1..=max_order {
            let j = (arg * order as f64 / (2.0 * PI)).round();
            let root = C64::from_polar(1.0, 2.0 * PI * j / order as f64);
            let distance = (self.q - root).norm();
            if distance < tol {
                return Err(Error::NearRootOfUnity {
                    q: self.q,
                    order,
                    distance,
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Plus,
    Minus,
}

/// `f̆(q^{±1/2} z)` as a Laurent polynomial.
pub fn eta_shift(f: &Poly, q: &QParam, direction: Shift) -> LaurentPoly {
    let c = match direction {
        Shift::Plus => q.half,
        Shift::Minus => 1.0 / q.half,
    };
    f.to_laurent().substitute_scaled(c)
}

/// The Askey-Wilson divided difference operator.
pub fn aw_d(f: &Poly, q: &QParam) -> Result<Poly> {
    if f.degree() == 0 {
        return Ok(Poly::zero());
    }
    let diff = &eta_shift(f, q, Shift::Plus) - &eta_shift(f, q, Shift::Minus);
    let quotient = diff.div_z_minus_inv()?;
    Ok(quotient.to_poly().scale(2.0 / q.half_gap()))
}

/// The averaging operator `(η₊f + η₋f)/2`.
pub fn aw_a(f: &Poly, q: &QParam) -> Poly {
    let sum = &eta_shift(f, q, Shift::Plus) + &eta_shift(f, q, Shift::Minus);
    sum.to_poly().scale(C64::new(0.5, 0.0))
}

/// `φ_n(x; a) = (a e^{iθ}, a e^{-iθ}; q)_n` as a polynomial in `x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiBasisElem {
    pub n: usize,
    pub a: C64,
    pub q: QParam,
}

impl PhiBasisElem {
    pub fn to_poly(&self) -> Poly {
        phi_poly(self.n, self.a, &self.q)
    }

    /// `(-2a)^n q^{n(n-1)/2}`.
    pub fn leading(&self) -> C64 {
        (-2.0 * self.a).powu(self.n as u32) * self.q.q.powf((self.n * self.n.saturating_sub(1)) as f64 / 2.0)
    }
}

pub fn phi_poly(n: usize, a: C64, q: &QParam) -> Poly {
    let mut out = Poly::one();
    let mut aqk = a;
    for _ in 0..n {
        let factor = Poly::raw(vec![C64::new(1.0, 0.0) + aqk * aqk, -2.0 * aqk]);
        out = &out * &factor;
        aqk *= q.q;
    }
    out
}

/// Pointwise `φ_α(cos θ; a) = (a e^{iθ}, a e^{-iθ}; q)_∞ / (a q^α e^{iθ}, a q^α e^{-iθ}; q)_∞`
/// for real (possibly non-integer) `α`; requires `|q| < 1`.
pub fn phi_alpha(theta: f64, alpha: f64, a: C64, q: &QParam) -> Result<C64> {
    let z = C64::from_polar(1.0, theta);
    let qa = q.q.powf(alpha);
    let num = weights::qpoch_inf_ln(a * z, q.q)? + weights::qpoch_inf_ln(a / z, q.q)?;
    let den = weights::qpoch_inf_ln(a * qa * z, q.q)? + weights::qpoch_inf_ln(a * qa / z, q.q)?;
    Ok((num - den).exp())
}

/// Coefficients of `f` in the basis `φ_n(x; a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiExpansion {
    pub coeffs: Vec<C64>,
    /// Present when the triangular solve was badly conditioned.
    pub warning: Option<String>,
}

pub fn expand_in_phi(f: &Poly, a: C64, q: &QParam) -> Result<PhiExpansion> {
    if a.norm() == 0.0 {
        return Err(Error::Domain("expand_in_phi needs a != 0".into()));
    }
    let d = f.degree();
    let basis: Vec<Poly> = (0..=d).map(|k| phi_poly(k, a, q)).collect();
    let mut rest = f.padded(d + 1);
    let mut coeffs = vec![C64::new(0.0, 0.0); d + 1];
    let fscale = f.max_abs().max(f64::MIN_POSITIVE);
    let mut growth: f64 = 1.0;
    for k in (0..=d).rev() {
        let lead = basis[k].coeff(k);
        if lead.norm() == 0.0 {
            return Err(Error::Domain(format!("phi basis degenerate at degree {k}")));
        }
        let c = rest[k] / lead;
        coeffs[k] = c;
        for (j, &b) in basis[k].coeffs().iter().enumerate() {
            rest[j] -= c * b;
        }
        growth = growth.max(c.norm() * basis[k].max_abs() / fscale);
    }
    if f.is_zero() {
        coeffs.clear();
    }
    let warning = (growth > 1e12).then(|| format!("phi expansion ill-conditioned (growth {growth:.3e})"));
    Ok(PhiExpansion { coeffs, warning })
}

/// `∫_{-1}^{1} f(x) conj(g(x)) (1-x²)^{-1/2} dx`, exact Gauss-Chebyshev quadrature.
pub fn inner_product(f: &Poly, g: &Poly) -> C64 {
    let m = (f.degree() + g.degree()) / 2 + 1;
    let sum: C64 = (1..=m)
        .map(|k| {
            let x = ((2 * k - 1) as f64 * PI / (2 * m) as f64).cos();
            f.eval_real(x) * g.eval_real(x).conj()
        })
        .sum();
    sum * (PI / m as f64)
}

/// A weight function on `(-1, 1)`, evaluable at `x` or at `θ` with `x = cos θ`.
pub trait Weight: Sync {
    fn at(&self, x: f64) -> C64;

    /// Override when `θ` gives better accuracy near `x = ±1`.
    fn at_theta(&self, theta: f64) -> C64 {
        self.at(theta.cos())
    }
}

impl<F: Fn(f64) -> C64 + Sync> Weight for F {
    fn at(&self, x: f64) -> C64 {
        self(x)
    }
}

/// `(1 - x²)^{-1/2}`.
pub struct ChebyshevWeight;

impl Weight for ChebyshevWeight {
    fn at(&self, x: f64) -> C64 {
        C64::new(1.0 / (1.0 - x * x).sqrt(), 0.0)
    }
    fn at_theta(&self, theta: f64) -> C64 {
        C64::new(1.0 / theta.sin(), 0.0)
    }
}

/// Node cap for [`weighted_inner_product`].
pub const MAX_QUADRATURE_NODES: usize = 1 << 16;

/// `∫_{-1}^{1} f conj(g) w dx` by tanh-sinh quadrature in `θ`, doubling the
/// node count until successive estimates agree to `1e-10` relative to `∫|·|`.
pub fn weighted_inner_product(f: &Poly, g: &Poly, w: &dyn Weight) -> Result<C64> {
    integrate_theta(&|theta: f64, sin_theta: f64| {
        let x = theta.cos();
        f.eval_real(x) * g.eval_real(x).conj() * w.at_theta(theta) * sin_theta
    })
}

/// Both sides of the integration by parts formula for the Chebyshev inner
/// product, `0 < q < 1`:
///
/// `<D_q f, g> = π√q/(1-q) [f(c) conj g(1) - f(-c) conj g(-1)] - <f, √(1-x²) D_q(g (1-x²)^{-1/2})>`
///
/// with `c = (q^{1/2} + q^{-1/2})/2`. The last term is not a polynomial
/// pairing; it is integrated in `θ`.
pub fn integration_by_parts(f: &Poly, g: &Poly, q: f64) -> Result<(C64, C64)> {
    if !(0.0 < q && q < 1.0) {
        return Err(Error::Domain(format!("integration by parts needs 0 < q < 1, got {q}")));
    }
    let qp = QParam::real(q)?;
    let lhs = inner_product(&aw_d(f, &qp)?, g);
    let h = q.sqrt();
    let c = C64::new(0.5 * (h + 1.0 / h), 0.0);
    let one = C64::new(1.0, 0.0);
    let boundary = PI * h / (1.0 - q) * (f.eval(c) * g.eval(one).conj() - f.eval(-c) * g.eval(-one).conj());
    let i = C64::i();
    // g(x) / sin θ as a function of z = e^{iθ}
    let g_over_sin = |w: C64| g.eval((w + 1.0 / w) * 0.5) * 2.0 * i / (w - 1.0 / w);
    let interior = integrate_theta(&|theta: f64, _| {
        let z = C64::from_polar(1.0, theta);
        let k = (g_over_sin(h * z) - g_over_sin(z / h)) / (i * (h - 1.0 / h));
        f.eval_real(theta.cos()) * k.conj()
    })?;
    Ok((lhs, boundary - interior))
}

/// Tanh-sinh on `(0, π)`; the integrand receives `θ` and an accurate `sin θ`.
pub(crate) fn integrate_theta(h: &dyn Fn(f64, f64) -> C64) -> Result<C64> {
    const T_MAX: f64 = 3.5;
    let mut previous: Option<C64> = None;
    let mut step = 0.25;
    loop {
        let count = (T_MAX / step).round() as i64;
        let nodes = 2 * count as usize + 1;
        let mut sum = C64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        for j in -count..=count {
            let t = j as f64 * step;
            let u = 0.5 * PI * t.sinh();
            // distance of the node from the nearer endpoint
            let delta = PI / (1.0 + (2.0 * u.abs()).exp());
            let theta = if t < 0.0 { delta } else { PI - delta };
            let dtheta = 0.5 * PI * 0.5 * PI * t.cosh() / u.cosh().powi(2);
            if dtheta == 0.0 || delta == 0.0 {
                continue;
            }
            let v = h(theta, delta.sin()) * dtheta;
            sum += v;
            abs_sum += v.norm();
        }
        let estimate = sum * step;
        let scale = (abs_sum * step).max(f64::MIN_POSITIVE);
        if let Some(prev) = previous {
            if (estimate - prev).norm() <= 1e-10 * scale {
                return Ok(estimate);
            }
        }
        if nodes * 2 > MAX_QUADRATURE_NODES {
            return Err(Error::QuadratureNotConverged {
                nodes,
                previous: previous.unwrap_or(estimate),
                last: estimate,
            });
        }
        previous = Some(estimate);
        step *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ChebKind;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn cheb(kind: ChebKind, n: usize) -> Poly {
        let mut v = vec![c(0.0); n + 1];
        v[n] = c(1.0);
        Poly::from_cheb(&v, kind)
    }

    #[test]
    fn eta_shift_examples() {
        let q = QParam::real(0.3).unwrap();
        let one = eta_shift(&Poly::one(), &q, Shift::Plus);
        assert_eq!(one.coeff(0), c(1.0));
        let x = eta_shift(&Poly::x(), &q, Shift::Plus);
        assert!((x.coeff(1) - q.half() / 2.0).norm() < 1e-15);
        assert!((x.coeff(-1) - 0.5 / q.half()).norm() < 1e-15);
    }

    #[test]
    fn d_and_a_on_chebyshev() {
        let q = QParam::real(0.5).unwrap();
        assert!((aw_d(&Poly::x(), &q).unwrap() - Poly::one()).is_zero());
        assert!(aw_d(&Poly::constant(c(3.0)), &q).unwrap().is_zero());
        let t3 = cheb(ChebKind::First, 3);
        let got = aw_d(&t3, &q).unwrap();
        let h = q.half();
        let k = (h.powi(3) - h.powi(-3)) / (h - 1.0 / h);
        let want = Poly::from_real(&[-1.0, 0.0, 4.0]).scale(k);
        assert!((&got - &want).max_abs() < 1e-13);

        assert_eq!(aw_a(&Poly::one(), &q), Poly::one());
        let ax = aw_a(&Poly::x(), &q);
        assert!((ax.coeff(1) - 0.5 * (h + 1.0 / h)).norm() < 1e-15);
    }

    #[test]
    fn phi_poly_examples() {
        let q = QParam::real(0.3).unwrap();
        let a = c(0.4);
        assert_eq!(phi_poly(0, a, &q), Poly::one());
        let p1 = phi_poly(1, a, &q);
        assert!((&p1 - &Poly::raw(vec![c(1.0) + a * a, -2.0 * a])).max_abs() < 1e-15);
        let p3 = phi_poly(3, a, &q);
        let want = (-0.8f64).powi(3) * 0.3f64.powi(3);
        assert!((p3.leading() - want).norm() < 1e-12 * want.abs());
        let elem = PhiBasisElem { n: 3, a, q };
        assert!((elem.leading() - want).norm() < 1e-12 * want.abs());
    }

    #[test]
    fn phi_expansion_examples() {
        let q = QParam::real(0.4).unwrap();
        let a = C64::new(0.3, 0.2);
        let e = expand_in_phi(&phi_poly(2, a, &q), a, &q).unwrap();
        assert!((e.coeffs[0]).norm() < 1e-14 && e.coeffs[1].norm() < 1e-14);
        assert!((e.coeffs[2] - 1.0).norm() < 1e-14);
        assert_eq!(expand_in_phi(&Poly::one(), a, &q).unwrap().coeffs, vec![c(1.0)]);
        assert!(expand_in_phi(&Poly::one(), c(0.0), &q).is_err());
    }

    #[test]
    fn inner_product_examples() {
        assert!((inner_product(&Poly::one(), &Poly::one()) - PI).norm() < 1e-14);
        assert!((inner_product(&Poly::x(), &Poly::x()) - PI / 2.0).norm() < 1e-14);
        let t2 = cheb(ChebKind::First, 2);
        let t3 = cheb(ChebKind::First, 3);
        assert!(inner_product(&t2, &t3).norm() < 1e-14);
    }

    #[test]
    fn weighted_inner_product_examples() {
        let unit = |_x: f64| c(1.0);
        let v = weighted_inner_product(&Poly::one(), &Poly::one(), &unit).unwrap();
        assert!((v - 2.0).norm() < 1e-10);
        let f = Poly::from_real(&[0.2, -1.0, 0.5]);
        let g = Poly::from_real(&[1.0, 0.3]);
        let v = weighted_inner_product(&f, &g, &ChebyshevWeight).unwrap();
        assert!((v - inner_product(&f, &g)).norm() < 1e-10);
    }

    #[test]
    fn root_of_unity_guard() {
        let q = QParam::new(C64::from_polar(1.0, 2.0 * PI / 5.0)).unwrap();
        assert!(q.check_root_of_unity(10, 1e-6).is_err());
        let q = QParam::new(C64::from_polar(1.0, 1.0)).unwrap();
        assert!(q.check_root_of_unity(10, 1e-6).is_ok());
    }
}
