//! The rational (`q -> 1`) sector: Wilson operators on polynomials in
//! `x = y²`, the XXX data `(Π, xΦ)`, ground-state configurations and the
//! cleared eigenproblem `P W²f + Q A W f = R f` with `P = xΠ`, `Q = xΦ`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bethe::{self, BetheRoots, LogSystem, NewtonReport, FACTOR_FLOOR};
use crate::error::{Error, Result};
use crate::heine::{self, PolyOperator, SolutionFlag, SolveReport, SolverOptions};
use crate::poly::{self, Poly};

const I: C64 = C64::new(0.0, 1.0);

/// `f((y + i/2)²)` as a polynomial in `y`.
fn shifted_in_y(f: &Poly) -> Poly {
    f.compose(&Poly::new(vec![C64::new(-0.25, 0.0), I, C64::new(1.0, 0.0)]))
}

/// Keeps the coefficients of `y^{2k + parity}` and returns them as a polynomial in `x = y²`.
fn parity_part(g: &Poly, parity: usize) -> Poly {
    Poly::new(g.coeffs().iter().skip(parity).step_by(2).copied().collect())
}

/// `W f = (η₊f - η₋f)/(2iy)`.
pub fn wilson_w(f: &Poly) -> Poly {
    parity_part(&shifted_in_y(f), 1).scale(-I)
}

/// `A f = (η₊f + η₋f)/2`.
pub fn wilson_a(f: &Poly) -> Poly {
    parity_part(&shifted_in_y(f), 0)
}

/// Spins `s_1..s_2N` with `N` even; odd `N` is padded with two zero spins.
#[derive(Clone, Debug, PartialEq)]
pub struct XxxParams {
    pub s: Vec<C64>,
    pub n_half: usize,
    pub varsigma: Vec<C64>,
}

impl XxxParams {
    pub fn new(s: Vec<C64>) -> Result<Self> {
        if s.is_empty() || !s.len().is_multiple_of(2) {
            return Err(Error::Degree(format!("need an even number of spins, got {}", s.len())));
        }
        let mut s = s;
        if (s.len() / 2) % 2 == 1 {
            s.extend([C64::new(0.0, 0.0); 2]);
        }
        let varsigma = poly::elem_sym(&s);
        Ok(Self {
            n_half: s.len() / 2,
            s,
            varsigma,
        })
    }

    pub fn from_real(s: &[f64]) -> Result<Self> {
        Self::new(s.iter().map(|&v| C64::new(v, 0.0)).collect())
    }
}

/// `(Π, xΦ)`.
pub fn xxx_pi_phi(params: &XxxParams) -> (Poly, Poly) {
    let n = params.n_half;
    let v = &params.varsigma;
    let sign = if (n / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let alt = |j: usize| if j.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut pi = vec![C64::new(0.0, 0.0); n + 1];
    pi[n] = C64::new(1.0, 0.0);
    let mut xphi = vec![C64::new(0.0, 0.0); n + 1];
    xphi[0] = 0.5 * v[2 * n];
    for j in 0..n {
        pi[n - j - 1] += alt(j) * (0.5 * v[2 * j + 1] - v[2 * j + 2]);
        xphi[n - j] += alt(j) * (0.5 * v[2 * j] - v[2 * j + 1]);
    }
    (
        Poly::new(pi).scale(C64::new(sign, 0.0)),
        Poly::new(xphi).scale(C64::new(sign, 0.0)),
    )
}

/// Shape of a ground-state reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundForm {
    /// `λ = 0` belongs to the root set (chains of length `4M + 2`).
    pub zero_root: bool,
    /// Residuals carry the factor `(y - i/2)/(y + i/2)`.
    pub half_factor: bool,
    /// Number of `±y` pairs in the ground-state sector.
    pub n: usize,
}

/// Spins of the sign-symmetric ground-state reduction for chain length `L`.
pub fn xxx_ground_config(l: usize, spin: f64) -> Result<(XxxParams, GroundForm)> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(Error::Domain(format!("chain length must be even and >= 2, got {l}")));
    }
    let m = l / 4;
    let c = |v: f64| C64::new(v, 0.0);
    let (s, zero_root) = if l % 4 == 2 {
        if (spin - 1.0).abs() < 1e-12 {
            let n = 2 * m + 1;
            let mut s = vec![c(0.0)];
            s.extend(std::iter::repeat_n(c(1.0), 2 * n - 1));
            (s, true)
        } else {
            let n = 2 * m + 2;
            let mut s = vec![c(0.0), c(-1.0)];
            s.extend(std::iter::repeat_n(c(spin), 2 * n - 2));
            (s, true)
        }
    } else {
        (vec![c(spin); 2 * (2 * m)], false)
    };
    Ok((
        XxxParams::new(s)?,
        GroundForm {
            zero_root,
            half_factor: true,
            n: m,
        },
    ))
}

/// `P W²f + Q A W f` with `P = xΠ`, `Q = xΦ`.
#[derive(Clone, Debug, PartialEq)]
pub struct WilsonProblem {
    pub p: Poly,
    pub q: Poly,
    pub n: usize,
    pub cleared: bool,
}

impl WilsonProblem {
    pub fn new(p: Poly, q: Poly, n: usize) -> Result<Self> {
        if p.coeff(0).norm() > 1e-14 * p.max_abs() {
            return Err(Error::Domain("P must vanish at x = 0".into()));
        }
        if p.degree() < 2 || q.degree() > p.degree() {
            return Err(Error::Degree(format!(
                "need deg P >= 2 and deg Q <= deg P, got {} and {}",
                p.degree(),
                q.degree()
            )));
        }
        Ok(Self { p, q, n, cleared: true })
    }

    pub fn from_params(params: &XxxParams, n: usize) -> Result<Self> {
        let (pi, xphi) = xxx_pi_phi(params);
        Self::new(pi.shift(1), xphi, n)
    }
}

impl PolyOperator for WilsonProblem {
    fn apply(&self, f: &Poly) -> Result<Poly> {
        let w = wilson_w(f);
        Ok(&self.p * &wilson_w(&w) + &self.q * &wilson_a(&w))
    }

    fn r_degree(&self) -> usize {
        self.p.degree() - 2
    }
}

/// Multistart solve of the cleared problem; `f(0) = 0` is flagged.
pub fn xxx_heine_solve(problem: &WilsonProblem, opts: &SolverOptions) -> Result<SolveReport> {
    let mut report = heine::solve(problem, problem.n, &[], opts)?;
    for sol in &mut report.solutions {
        if sol.y.coeff(0).norm() < 1e-10 * sol.y.max_abs() {
            sol.flags.push(SolutionFlag::ZeroRoot);
        }
    }
    Ok(report)
}

/// Smallest positive integer `d <= 4096` making `dP` and `dQ` integral,
/// signed so that `d · lead(Q) > 0`.
pub fn display_normalization(p: &Poly, q: &Poly) -> Option<f64> {
    let integral = |d: f64| {
        p.coeffs().iter().chain(q.coeffs()).all(|c| {
            let v = c * d;
            v.im.abs() < 1e-9 && (v.re - v.re.round()).abs() < 1e-9 * v.re.abs().max(1.0)
        })
    };
    let d = (1..=4096).map(f64::from).find(|&d| integral(d))?;
    Some(if q.leading().re < 0.0 { -d } else { d })
}

fn ln_checked(acc: &mut C64, z: C64, sign: f64) -> bool {
    if z.norm() < FACTOR_FLOOR {
        return false;
    }
    *acc += sign * z.ln();
    true
}

fn ln_lhs(y: &[C64], k: usize, s: &[C64], half: bool) -> Option<C64> {
    let yk = y[k];
    let mut acc = C64::new(0.0, 0.0);
    if half && !(ln_checked(&mut acc, yk - 0.5 * I, 1.0) && ln_checked(&mut acc, yk + 0.5 * I, -1.0)) {
        return None;
    }
    for &sl in s {
        if !(ln_checked(&mut acc, yk + sl * I, 1.0) && ln_checked(&mut acc, yk - sl * I, -1.0)) {
            return None;
        }
    }
    for (j, &yj) in y.iter().enumerate() {
        if j == k {
            continue;
        }
        let ok = ln_checked(&mut acc, yk - yj + I, -1.0)
            && ln_checked(&mut acc, yk + yj + I, -1.0)
            && ln_checked(&mut acc, yk - yj - I, 1.0)
            && ln_checked(&mut acc, yk + yj - I, 1.0);
        if !ok {
            return None;
        }
    }
    Some(acc)
}

/// Per-root `LHS/RHS - 1` of the rational Bethe system; `half_factor`
/// includes `(y_k - i/2)/(y_k + i/2)` on the left.
pub fn xxx_residuals(yroots: &[C64], s: &[C64], half_factor: bool) -> Vec<Option<C64>> {
    (0..yroots.len())
        .map(|k| Some(ln_lhs(yroots, k, s, half_factor)?.exp() - 1.0))
        .collect()
}

fn xxx_jacobian(y: &[C64], s: &[C64], half: bool) -> DMatrix<C64> {
    let n = y.len();
    DMatrix::from_fn(n, n, |k, j| {
        let yk = y[k];
        if j == k {
            let mut d: C64 = s.iter().map(|&sl| 1.0 / (yk + sl * I) - 1.0 / (yk - sl * I)).sum();
            if half {
                d += 1.0 / (yk - 0.5 * I) - 1.0 / (yk + 0.5 * I);
            }
            for (i, &yi) in y.iter().enumerate() {
                if i != k {
                    d -= 1.0 / (yk - yi + I) + 1.0 / (yk + yi + I) - 1.0 / (yk - yi - I) - 1.0 / (yk + yi - I);
                }
            }
            d
        } else {
            let yj = y[j];
            -(-1.0 / (yk - yj + I) + 1.0 / (yk + yj + I) + 1.0 / (yk - yj - I) - 1.0 / (yk + yj - I))
        }
    })
}

/// `y_k = √x_k` (principal branch).
pub fn y_from_x(x: &[C64]) -> Vec<C64> {
    x.iter().map(|v| v.sqrt()).collect()
}

/// Roots given as `y_k` with residuals; colliding `x_k = y_k²` are indeterminate.
pub fn roots_from_y(y: Vec<C64>, s: &[C64], half: bool) -> BetheRoots {
    let x: Vec<C64> = y.iter().map(|v| v * v).collect();
    let close = poly::collisions(&x, heine::COLLISION);
    let residuals = bethe::mask(xxx_residuals(&y, s, half), &close);
    let flags = residuals.iter().map(Option::is_none).collect();
    BetheRoots {
        lambdas: y,
        x,
        residuals,
        flags,
    }
}

/// Roots of `f` as `y_k = √x_k` with residuals.
pub fn xxx_roots(f: &Poly, s: &[C64], half_factor: bool) -> Result<BetheRoots> {
    let x = f.roots()?.roots;
    Ok(roots_from_y(y_from_x(&x), s, half_factor))
}

/// Multistart Newton on the rational Bethe system in the `y_k`.
pub fn xxx_newton_solve(
    s: &[C64],
    n: usize,
    starts: &[Vec<C64>],
    half_factor: bool,
    opts: &SolverOptions,
) -> Result<NewtonReport> {
    if n == 0 {
        return Ok(NewtonReport {
            solutions: vec![bethe::BetheSolution {
                roots: roots_from_y(Vec::new(), s, half_factor),
                newton_iterations: 0,
                branch: Vec::new(),
            }],
            diagnostics: bethe::NewtonDiagnostics {
                starts: 1,
                converged: 1,
                distinct: 1,
                best_unconverged: None,
            },
        });
    }
    if let Some(bad) = starts.iter().find(|v| v.len() != n) {
        return Err(Error::Degree(format!("start of length {} for n = {n}", bad.len())));
    }
    let lhs = |y: &[C64], k: usize| ln_lhs(y, k, s, half_factor);
    let jac = |y: &[C64]| xxx_jacobian(y, s, half_factor);
    let sys = LogSystem {
        ln_lhs: &lhs,
        jac: &jac,
    };
    let outcomes: Vec<_> = starts
        .par_iter()
        .map(|st| sys.run(st, opts.tolerance, opts.max_iter))
        .collect();
    bethe::collect_newton(outcomes, opts, |o| roots_from_y(o.point.clone(), s, half_factor))
}
