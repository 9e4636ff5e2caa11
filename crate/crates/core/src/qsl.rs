//! The XXZ q-Sturm-Liouville problem `Π D_q² y + Φ A_q D_q y = r y`.
//!
//! `build_pi_phi` turns the parameters `a_1..a_2N` into `(Π, Φ)` and
//! `recover_params` inverts it. For `N = 2` the eigenfunctions are the monic
//! Askey-Wilson polynomials, available here through their recurrence.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::awop::{self, QParam};
use crate::error::{Error, Result};
use crate::heine::{self, PolyOperator, SolutionFlag, SolveReport, SolverOptions};
use crate::poly::{self, ChebKind, Poly};
use crate::trig::ln_sin;

/// Parameters `a_1..a_2N` (or spins with `a_j = q^{-s_j}`) and `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct XxzParams {
    pub q: QParam,
    pub a: Vec<C64>,
    pub s: Option<Vec<C64>>,
}

impl XxzParams {
    pub fn from_a(q: QParam, a: Vec<C64>) -> Result<Self> {
        if a.is_empty() || !a.len().is_multiple_of(2) {
            return Err(Error::Degree(format!(
                "parameter vector needs an even, nonzero length, got {}",
                a.len()
            )));
        }
        Ok(Self { q, a, s: None })
    }

    /// `q = e^{2iη}` and `a_j = e^{-2iη s_j}`.
    pub fn from_spins(eta: C64, s: Vec<C64>) -> Result<Self> {
        let q = QParam::from_eta(eta);
        let a = s.iter().map(|&sj| (-2.0 * C64::i() * eta * sj).exp()).collect();
        let mut p = Self::from_a(q, a)?;
        p.s = Some(s);
        Ok(p)
    }

    /// `N`, half the number of parameters.
    pub fn n_half(&self) -> usize {
        self.a.len() / 2
    }

    /// `σ_0..σ_2N`.
    pub fn sigma(&self) -> Vec<C64> {
        poly::elem_sym(&self.a)
    }
}

/// `Π = -q^{-N/4} {(-1)^N σ_N + Σ_{l<N} (-1)^l (σ_l + σ_{2N-l}) T_{N-l}}` and
/// `Φ = 2 q^{-N/4} / (q^{1/2} - q^{-1/2}) Σ_{l<N} (-1)^l (σ_l - σ_{2N-l}) U_{N-l-1}`.
pub fn build_pi_phi(params: &XxzParams) -> (Poly, Poly) {
    let n = params.n_half();
    let sigma = params.sigma();
    let pre = params.q.quarter().powi(-(n as i32));
    let sign = |l: usize| if l.is_multiple_of(2) { 1.0 } else { -1.0 };

    let mut t = vec![C64::new(0.0, 0.0); n + 1];
    t[0] = sigma[n] * sign(n);
    for l in 0..n {
        t[n - l] += (sigma[l] + sigma[2 * n - l]) * sign(l);
    }
    let pi = Poly::from_cheb(&t, ChebKind::First).scale(-pre);

    let mut u = vec![C64::new(0.0, 0.0); n];
    for l in 0..n {
        u[n - l - 1] = (sigma[l] - sigma[2 * n - l]) * sign(l);
    }
    let phi = Poly::from_cheb(&u, ChebKind::Second).scale(2.0 * pre / params.q.half_gap());
    (pi, phi)
}

/// Recovers `{a_j}` from `(Π, Φ)`.
pub fn recover_params(pi: &Poly, phi: &Poly, q: &QParam) -> Result<Vec<C64>> {
    let n = pi.degree();
    if n < 2 || phi.degree() + 1 != n {
        return Err(Error::Degree(format!(
            "need deg Π = deg Φ + 1 >= 2, got {} and {}",
            pi.degree(),
            phi.degree()
        )));
    }
    let pre = q.quarter().powi(-(n as i32));
    let sign = |l: usize| if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    let p: Vec<C64> = pi
        .cheb_decompose(ChebKind::First)
        .into_iter()
        .map(|c| c / (-pre))
        .collect();
    let f: Vec<C64> = phi
        .cheb_decompose(ChebKind::Second)
        .into_iter()
        .map(|c| c * q.half_gap() / (2.0 * pre))
        .collect();
    let coeff = |v: &[C64], k: usize| v.get(k).copied().unwrap_or_default();

    let mut sigma = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for l in 0..n {
        let plus = coeff(&p, n - l) * sign(l);
        let minus = coeff(&f, n - l - 1) * sign(l);
        sigma[l] = 0.5 * (plus + minus);
        sigma[2 * n - l] = 0.5 * (plus - minus);
    }
    sigma[n] = coeff(&p, 0) * sign(n);
    let scale = sigma.iter().map(|s| s.norm()).fold(1.0, f64::max);
    if (sigma[0] - 1.0).norm() > 1e-8 * scale {
        return Err(Error::NotInImage { sigma0: sigma[0] });
    }
    sigma[0] = C64::new(1.0, 0.0);
    let top = sigma.iter().map(|s| s.norm()).fold(0.0, f64::max);
    for s in sigma.iter_mut() {
        if s.norm() < 1e-14 * top {
            *s = C64::new(0.0, 0.0);
        }
    }
    // prod (t - a_j) = Σ_l (-1)^l σ_l t^{2N-l}
    let mut asc = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for (l, s) in sigma.iter().enumerate() {
        asc[2 * n - l] = s * sign(l);
    }
    Ok(Poly::raw(asc).roots()?.roots)
}

/// `(Π, Φ)`, `q` and the target degree.
#[derive(Clone, Debug, PartialEq)]
pub struct QslProblem {
    pub pi: Poly,
    pub phi: Poly,
    pub q: QParam,
    pub n: usize,
}

impl QslProblem {
    pub fn new(pi: Poly, phi: Poly, q: QParam, n: usize) -> Result<Self> {
        if pi.degree() < 2 || phi.degree() + 1 != pi.degree() {
            return Err(Error::Degree(format!(
                "need deg Π = deg Φ + 1 >= 2, got {} and {}",
                pi.degree(),
                phi.degree()
            )));
        }
        Ok(Self { pi, phi, q, n })
    }

    pub fn from_params(params: &XxzParams, n: usize) -> Result<Self> {
        let (pi, phi) = build_pi_phi(params);
        Self::new(pi, phi, params.q, n)
    }

    /// `N = deg Π`.
    pub fn n_half(&self) -> usize {
        self.pi.degree()
    }
}

impl PolyOperator for QslProblem {
    fn apply(&self, f: &Poly) -> Result<Poly> {
        apply_l(self, f)
    }

    fn r_degree(&self) -> usize {
        self.n_half() - 2
    }
}

/// `Π D_q² f + Φ A_q D_q f`.
pub fn apply_l(problem: &QslProblem, f: &Poly) -> Result<Poly> {
    let d1 = awop::aw_d(f, &problem.q)?;
    let d2 = awop::aw_d(&d1, &problem.q)?;
    let ad = awop::aw_a(&d1, &problem.q);
    Ok(&(&problem.pi * &d2) + &(&problem.phi * &ad))
}

/// `λ_n = -4q (1 - q^{-n})(1 - σ_4 q^{n-1}) / (1 - q)²`.
///
/// With `(Π, Φ)` from [`build_pi_phi`] at `N = 2`, the Askey-Wilson polynomial
/// satisfies `apply_l(p_n) = -λ_n p_n`.
pub fn aw_eigenvalue(n: usize, sigma4: C64, q: &QParam) -> C64 {
    let q = q.q();
    let qn = q.powi(n as i32);
    -4.0 * q * (1.0 - 1.0 / qn) * (1.0 - sigma4 * qn / q) / ((1.0 - q) * (1.0 - q))
}

/// Coefficients of the monic three-term recurrence
/// `x p_n = p_{n+1} + b p_n + 4 A_{n-1} C_n p_{n-1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Recurrence {
    pub a: C64,
    pub c: C64,
    pub b: C64,
}

const SINGULAR: f64 = 1e-12;

fn ln_sin_checked(arg: C64, n: usize) -> Result<C64> {
    let v = ln_sin(arg);
    if v.re < SINGULAR.ln() {
        return Err(Error::RecurrenceSingular(n));
    }
    Ok(v)
}

/// Recurrence data in trigonometric form for `a_j = e^{-2iη s_j}`.
///
/// `b_n = cos(2 s_1 η) + 2A_n + 2C_n`.
pub fn aw_recurrence(n: usize, s: &[C64; 4], eta: C64) -> Result<Recurrence> {
    let sp: C64 = s.iter().sum();
    let nf = n as f64;
    let mut num = ln_sin((nf - 1.0 - sp) * eta);
    for sj in &s[1..] {
        num += ln_sin((nf - s[0] - sj) * eta);
    }
    let den = ln_sin_checked((2.0 * nf - 1.0 - sp) * eta, n)? + ln_sin_checked((2.0 * nf - sp) * eta, n)?;
    let a = (num - den).exp();
    let c = if n == 0 {
        C64::new(0.0, 0.0)
    } else {
        let mut num = ln_sin(nf * eta);
        for j in 1..4 {
            for k in j + 1..4 {
                num += ln_sin((nf - 1.0 - s[j] - s[k]) * eta);
            }
        }
        let den = ln_sin_checked((2.0 * nf - 1.0 - sp) * eta, n)? + ln_sin_checked((2.0 * nf - 2.0 - sp) * eta, n)?;
        (num - den).exp()
    };
    let b = (2.0 * s[0] * eta).cos() + 2.0 * a + 2.0 * c;
    Ok(Recurrence { a, c, b })
}

/// `(b_k)_{k<n}` and `(g_k = 4 A_{k-1} C_k)_{1<=k<n}` of the monic recurrence.
pub fn aw_jacobi(n: usize, s: &[C64; 4], eta: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    let recs = (0..n).map(|k| aw_recurrence(k, s, eta)).collect::<Result<Vec<_>>>()?;
    let b = recs.iter().map(|r| r.b).collect();
    let g = (1..n).map(|k| 4.0 * recs[k - 1].a * recs[k].c).collect();
    Ok((b, g))
}

/// Zeros of the degree-`n` Askey-Wilson polynomial as eigenvalues of the
/// Jacobi matrix, ascending by real part. The symmetric form is used when
/// the recurrence is real with positive `g_k`.
pub fn aw_zeros(n: usize, s: &[C64; 4], eta: C64) -> Result<Vec<C64>> {
    let (b, g) = aw_jacobi(n, s, eta)?;
    let real = b.iter().chain(&g).all(|v| v.im.abs() <= 1e-14 * v.norm().max(1.0));
    let mut zeros: Vec<C64> = if real && g.iter().all(|v| v.re > 0.0) {
        let m = DMatrix::<f64>::from_fn(n, n, |i, j| {
            if i == j {
                b[i].re
            } else if i + 1 == j || j + 1 == i {
                g[i.min(j)].re.sqrt()
            } else {
                0.0
            }
        });
        m.symmetric_eigenvalues().iter().map(|&v| C64::new(v, 0.0)).collect()
    } else {
        let m = DMatrix::<C64>::from_fn(n, n, |i, j| {
            if i == j {
                b[i]
            } else if i + 1 == j {
                C64::new(1.0, 0.0)
            } else if j + 1 == i {
                g[j]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let t = m.schur().unpack().1;
        t.diagonal().iter().copied().collect()
    };
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(zeros)
}

/// Monic Askey-Wilson polynomial of degree `n` from the recurrence.
pub fn aw_poly(n: usize, s: &[C64; 4], eta: C64) -> Result<Poly> {
    let recs = (0..n).map(|k| aw_recurrence(k, s, eta)).collect::<Result<Vec<_>>>()?;
    let b: Vec<C64> = recs.iter().map(|r| r.b).collect();
    let g: Vec<C64> = (0..n)
        .map(|k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                4.0 * recs[k - 1].a * recs[k].c
            }
        })
        .collect();
    Ok(monic_from_recurrence(&b, &g))
}

/// Recurrence in the parameters `a, b, c, d` directly:
/// `b_n = (a + 1/a - A_n - C_n)/2`, `g_n = A_{n-1} C_n / 4` with the
/// standard `A_n`, `C_n` of the Askey-Wilson family.
pub fn aw_recurrence_a(n: usize, p: &[C64; 4], q: C64) -> Result<(C64, C64)> {
    let [a, b, c, d] = *p;
    if a.norm() == 0.0 {
        return Err(Error::Domain("first Askey-Wilson parameter must be nonzero".into()));
    }
    let abcd = a * b * c * d;
    let qn = q.powi(n as i32);
    let check = |v: C64| {
        if v.norm() < SINGULAR {
            Err(Error::RecurrenceSingular(n))
        } else {
            Ok(v)
        }
    };
    let big_a = (1.0 - a * b * qn) * (1.0 - a * c * qn) * (1.0 - a * d * qn) * (1.0 - abcd * qn / q)
        / (a * check(1.0 - abcd * qn * qn / q)? * check(1.0 - abcd * qn * qn)?);
    let big_c = if n == 0 {
        C64::new(0.0, 0.0)
    } else {
        a * (1.0 - qn) * (1.0 - b * c * qn / q) * (1.0 - b * d * qn / q) * (1.0 - c * d * qn / q)
            / (check(1.0 - abcd * qn * qn / (q * q))? * check(1.0 - abcd * qn * qn / q)?)
    };
    Ok((big_a, big_c))
}

/// Monic Askey-Wilson polynomial from the parameter form of the recurrence.
pub fn aw_poly_a(n: usize, p: &[C64; 4], q: C64) -> Result<Poly> {
    let ac = (0..n).map(|k| aw_recurrence_a(k, p, q)).collect::<Result<Vec<_>>>()?;
    let a = p[0];
    let b: Vec<C64> = ac.iter().map(|(x, y)| 0.5 * (a + 1.0 / a - x - y)).collect();
    let g: Vec<C64> = (0..n)
        .map(|k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                0.25 * ac[k - 1].0 * ac[k].1
            }
        })
        .collect();
    Ok(monic_from_recurrence(&b, &g))
}

fn monic_from_recurrence(b: &[C64], g: &[C64]) -> Poly {
    let mut prev = Poly::zero();
    let mut cur = Poly::one();
    for k in 0..b.len() {
        let next = &(&cur.shift(1) - &cur.scale(b[k])) - &prev.scale(g[k]);
        prev = cur;
        cur = next;
    }
    cur
}

/// Largest `M` with `A_{k-1} C_k > 0` for `1 <= k <= M`, scanned up to `cap`.
pub fn orthogonality_window(s: &[f64; 4], eta: f64, cap: usize) -> usize {
    let sc = s.map(|v| C64::new(v, 0.0));
    let eta = C64::new(eta, 0.0);
    let mut prev = match aw_recurrence(0, &sc, eta) {
        Ok(r) => r,
        Err(_) => return 0,
    };
    for k in 1..=cap {
        let cur = match aw_recurrence(k, &sc, eta) {
            Ok(r) => r,
            Err(_) => return k - 1,
        };
        let g = prev.a * cur.c;
        if !(g.re > 0.0) || g.im.abs() > 1e-12 * g.norm() {
            return k - 1;
        }
        prev = cur;
    }
    cap
}

/// Multistart solve of `L(y) = r y`; adds boundary flags for roots at `x = ±1`.
pub fn heine_stieltjes_solve(problem: &QslProblem, opts: &SolverOptions) -> Result<SolveReport> {
    let order = 2 * (problem.n_half() + problem.n);
    if (problem.q.q().norm() - 1.0).abs() < 1e-6 {
        problem.q.check_root_of_unity(order, 1e-6)?;
    }
    let mut hints = Vec::new();
    if problem.n_half() == 2 && problem.n > 0 {
        if let Ok(a) = recover_params(&problem.pi, &problem.phi, &problem.q) {
            let a4 = [a[0], a[1], a[2], a[3]];
            if let Ok(p) = aw_poly_a(problem.n, &a4, problem.q.q()) {
                if let Ok(r) = p.roots() {
                    hints.push(r.roots);
                }
            }
        }
    }
    let mut report = heine::solve(problem, problem.n, &hints, opts)?;
    for sol in &mut report.solutions {
        if sol
            .roots
            .iter()
            .any(|x| (1.0 - x * x).sqrt().norm() < 1e-10 || (x * x - 1.0).norm() < 1e-10)
        {
            sol.flags.push(SolutionFlag::BoundaryRoot);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn all_zero_parameters() {
        let q = QParam::real(0.4).unwrap();
        let p = XxzParams::from_a(q, vec![c(0.0); 6]).unwrap();
        let (pi, phi) = build_pi_phi(&p);
        let pre = q.quarter().powi(-3);
        let t3 = Poly::from_real(&[0.0, -3.0, 0.0, 4.0]).scale(-pre);
        let u2 = Poly::from_real(&[-1.0, 0.0, 4.0]).scale(2.0 * pre / q.half_gap());
        assert!((&pi - &t3).max_abs() < 1e-13);
        assert!((&phi - &u2).max_abs() < 1e-13);
    }

    #[test]
    fn recover_all_zero() {
        let q = QParam::real(0.4).unwrap();
        let pre = q.quarter().powi(-2);
        let pi = Poly::from_real(&[-1.0, 0.0, 2.0]).scale(-pre);
        let phi = Poly::from_real(&[0.0, 2.0]).scale(2.0 * pre / q.half_gap());
        let a = recover_params(&pi, &phi, &q).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn recover_rejects_foreign_data() {
        let q = QParam::real(0.4).unwrap();
        let pi = Poly::from_real(&[0.0, 0.0, 5.0]);
        let phi = Poly::from_real(&[0.0, 1.0]);
        assert!(matches!(recover_params(&pi, &phi, &q), Err(Error::NotInImage { .. })));
    }

    #[test]
    fn eigenvalue_examples() {
        let q = QParam::real(0.25).unwrap();
        assert_eq!(aw_eigenvalue(0, c(0.3), &q), c(0.0));
        assert!((aw_eigenvalue(1, c(0.0), &q) - 16.0 / 3.0).norm() < 1e-13);
    }

    #[test]
    fn c0_vanishes() {
        let s = [c(-0.5), c(-0.5), c(-0.7), c(-0.9)];
        let r = aw_recurrence(0, &s, C64::new(0.0, 0.3)).unwrap();
        assert_eq!(r.c, c(0.0));
        let p1 = aw_poly(1, &s, C64::new(0.0, 0.3)).unwrap();
        assert!((p1.coeff(0) + r.b).norm() < 1e-15);
    }

    #[test]
    fn both_recurrence_forms_agree() {
        let eta = C64::new(0.0, 0.3);
        let s = [c(-0.5), c(-0.5), c(-0.7), c(-0.9)];
        let p = XxzParams::from_spins(eta, s.to_vec()).unwrap();
        let a = [p.a[0], p.a[1], p.a[2], p.a[3]];
        for n in 0..8 {
            let lhs = aw_poly(n, &s, eta).unwrap();
            let rhs = aw_poly_a(n, &a, p.q.q()).unwrap();
            assert!((&lhs - &rhs).max_abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn empty_window() {
        // s chosen so that A_0 C_1 < 0 at this real η
        let s = [0.3, 0.1, -0.2, 0.4];
        let eta = 0.7;
        let r0 = aw_recurrence(0, &s.map(c), c(eta)).unwrap();
        let r1 = aw_recurrence(1, &s.map(c), c(eta)).unwrap();
        let g = r0.a * r1.c;
        let m = orthogonality_window(&s, eta, 64);
        if g.re <= 0.0 {
            assert_eq!(m, 0);
        } else {
            assert!(m >= 1);
        }
    }
}
