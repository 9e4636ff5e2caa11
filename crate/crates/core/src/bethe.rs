//! Bethe equations in trigonometric, general `(Π, Φ)` and classical form.
//!
//! Roots are carried as `λ_k` with `x_k = cos 2λ_k`. Residuals are
//! `LHS_k / RHS_k - 1`, with every product accumulated as a sum of logs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heine::{self, ClassicalOperator, SolveReport, SolverOptions};
use crate::poly::{self, Poly};
use crate::trig::{cot, ln_sin};

/// Factors below this magnitude make a residual indeterminate.
pub const FACTOR_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct BetheRoots {
    pub lambdas: Vec<C64>,
    pub x: Vec<C64>,
    /// `None` marks an indeterminate entry (a vanishing factor).
    pub residuals: Vec<Option<C64>>,
    /// Root sits at `x = ±1` (`sin 2λ = 0`) or collides with another root.
    pub flags: Vec<bool>,
}

impl BetheRoots {
    /// Fills `residuals` from `xxz_residuals`, leaving flagged roots indeterminate.
    pub fn with_xxz_residuals(mut self, s: &[C64], eta: C64) -> Self {
        self.residuals = mask(xxz_residuals(&self.lambdas, s, eta), &self.flags);
        self
    }

    /// Largest finite residual magnitude; `None` if any entry is indeterminate.
    pub fn max_residual(&self) -> Option<f64> {
        self.residuals
            .iter()
            .try_fold(0.0f64, |m, r| r.map(|v| m.max(v.norm())))
    }
}

pub(crate) fn mask(residuals: Vec<Option<C64>>, flags: &[bool]) -> Vec<Option<C64>> {
    residuals
        .into_iter()
        .zip(flags)
        .map(|(r, &f)| if f { None } else { r })
        .collect()
}

fn lambda_of(x: C64) -> C64 {
    0.5 * x.acos()
}

/// Roots of `y` mapped to `λ = ½ arccos x` (principal branch).
pub fn extract_lambdas(y: &Poly) -> Result<BetheRoots> {
    let x = y.roots()?.roots;
    Ok(from_x(x))
}

/// Roots given as `x_k`; residuals are left empty.
pub fn from_x(x: Vec<C64>) -> BetheRoots {
    let lambdas = x.iter().map(|&v| lambda_of(v)).collect();
    let close = poly::collisions(&x, heine::COLLISION);
    let flags = x
        .iter()
        .zip(close)
        .map(|(v, c)| c || (v - 1.0).norm() < 1e-10 || (v + 1.0).norm() < 1e-10)
        .collect();
    BetheRoots {
        lambdas,
        x,
        residuals: Vec::new(),
        flags,
    }
}

fn checked(acc: &mut C64, z: C64, sign: f64) -> bool {
    let v = ln_sin(z);
    if v.re < FACTOR_FLOOR.ln() {
        return false;
    }
    *acc += sign * v;
    true
}

/// `ln` of the pair product `∏_{j≠k} sin(λ_k+λ_j+η) sin(λ_k-λ_j+η) / (sin(λ_k+λ_j-η) sin(λ_k-λ_j-η))`.
fn ln_pair(lambdas: &[C64], k: usize, eta: C64) -> Option<C64> {
    let lk = lambdas[k];
    let mut acc = C64::new(0.0, 0.0);
    for (j, &lj) in lambdas.iter().enumerate() {
        if j == k {
            continue;
        }
        let ok = checked(&mut acc, lk + lj + eta, 1.0)
            && checked(&mut acc, lk - lj + eta, 1.0)
            && checked(&mut acc, lk + lj - eta, -1.0)
            && checked(&mut acc, lk - lj - eta, -1.0);
        if !ok {
            return None;
        }
    }
    Some(acc)
}

fn ln_spin(lk: C64, s: &[C64], eta: C64) -> Option<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for &sl in s {
        if !(checked(&mut acc, lk + sl * eta, 1.0) && checked(&mut acc, lk - sl * eta, -1.0)) {
            return None;
        }
    }
    Some(acc)
}

/// `∏_l sin(λ_k+s_lη)/sin(λ_k-s_lη)` over the pair product, minus one.
pub fn xxz_residuals(lambdas: &[C64], s: &[C64], eta: C64) -> Vec<Option<C64>> {
    (0..lambdas.len())
        .map(|k| {
            let lhs = ln_spin(lambdas[k], s, eta)?;
            let rhs = ln_pair(lambdas, k, eta)?;
            Some((lhs - rhs).exp() - 1.0)
        })
        .collect()
}

/// `(Π + Φ sin η sin 2λ_k)/(Π - Φ sin η sin 2λ_k)` over the pair product, minus one.
pub fn general_residuals(lambdas: &[C64], pi: &Poly, phi: &Poly, eta: C64) -> Vec<Option<C64>> {
    (0..lambdas.len())
        .map(|k| {
            let lk = lambdas[k];
            let x = (2.0 * lk).cos();
            let p = pi.eval(x);
            let f = phi.eval(x) * eta.sin() * (2.0 * lk).sin();
            let (num, den) = (p + f, p - f);
            if num.norm() < FACTOR_FLOOR || den.norm() < FACTOR_FLOOR {
                return None;
            }
            let rhs = ln_pair(lambdas, k, eta)?;
            Some((num.ln() - den.ln() - rhs).exp() - 1.0)
        })
        .collect()
}

/// `Σ_{j≠k} 1/(x_j - x_k) - Φ(x_k)/(2Π(x_k))`.
pub fn heine_ode_residuals(x: &[C64], pi: &Poly, phi: &Poly) -> Result<Vec<C64>> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if (x[i] - x[j]).norm() < 1e-12 {
                return Err(Error::CoincidentPoints(i, j));
            }
        }
    }
    x.iter()
        .enumerate()
        .map(|(k, &xk)| {
            let p = pi.eval(xk);
            if p.norm() == 0.0 {
                return Err(Error::Domain(format!("Π vanishes at x_{k} = {xk}")));
            }
            let sum: C64 = x
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &xj)| 1.0 / (xj - xk))
                .sum();
            Ok(sum - phi.eval(xk) / (2.0 * p))
        })
        .collect()
}

/// Classical Heine-Stieltjes problem `Π y'' + Φ y' = r y`.
pub fn classical_solve(pi: &Poly, phi: &Poly, n: usize, opts: &SolverOptions) -> Result<SolveReport> {
    let op = ClassicalOperator {
        pi: pi.clone(),
        phi: phi.clone(),
    };
    heine::solve(&op, n, &[], opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetheSolution {
    pub roots: BetheRoots,
    pub newton_iterations: usize,
    /// Integer branch `m_k` in `ln LHS_k - ln RHS_k = 2πi m_k`.
    pub branch: Vec<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NewtonDiagnostics {
    pub starts: usize,
    pub converged: usize,
    pub distinct: usize,
    pub best_unconverged: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonReport {
    pub solutions: Vec<BetheSolution>,
    pub diagnostics: NewtonDiagnostics,
}

fn wrap(z: C64) -> (C64, i64) {
    let m = (z.im / std::f64::consts::TAU).round();
    (C64::new(z.re, z.im - m * std::f64::consts::TAU), m as i64)
}

/// Shared Newton loop on `F_k = Log(LHS_k/RHS_k)`.
pub(crate) struct LogSystem<'a> {
    pub ln_lhs: &'a (dyn Fn(&[C64], usize) -> Option<C64> + Sync),
    pub jac: &'a (dyn Fn(&[C64]) -> DMatrix<C64> + Sync),
}

pub(crate) struct NewtonOutcome {
    pub converged: bool,
    pub point: Vec<C64>,
    pub residual: f64,
    pub iterations: usize,
    pub branch: Vec<i64>,
}

impl LogSystem<'_> {
    fn eval(&self, p: &[C64]) -> Option<(Vec<C64>, Vec<i64>)> {
        let mut f = Vec::with_capacity(p.len());
        let mut m = Vec::with_capacity(p.len());
        for k in 0..p.len() {
            let (v, b) = wrap((self.ln_lhs)(p, k)?);
            if !v.re.is_finite() || !v.im.is_finite() {
                return None;
            }
            f.push(v);
            m.push(b);
        }
        Some((f, m))
    }

    pub fn run(&self, start: &[C64], tol: f64, max_iter: usize) -> Option<NewtonOutcome> {
        let norm = |f: &[C64]| f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut p = start.to_vec();
        let (mut f, mut branch) = self.eval(&p)?;
        let mut res = norm(&f);
        let mut it = 0;
        while res > tol && it < max_iter {
            it += 1;
            let j = (self.jac)(&p);
            let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
            let step = j.lu().solve(&rhs)?;
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-4 {
                let trial: Vec<C64> = p.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
                if let Some((nf, nb)) = self.eval(&trial) {
                    let nres = norm(&nf);
                    if nres < res || (t == 1.0 && nres < 2.0 * res && res > 1.0) {
                        p = trial;
                        f = nf;
                        branch = nb;
                        res = nres;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        res.is_finite().then_some(NewtonOutcome {
            converged: res <= tol,
            point: p,
            residual: res,
            iterations: it,
            branch,
        })
    }
}

fn xxz_jacobian(l: &[C64], s: &[C64], eta: C64) -> DMatrix<C64> {
    let n = l.len();
    DMatrix::from_fn(n, n, |k, j| {
        let lk = l[k];
        if j == k {
            let mut d: C64 = s.iter().map(|&sl| cot(lk + sl * eta) - cot(lk - sl * eta)).sum();
            for (i, &li) in l.iter().enumerate() {
                if i != k {
                    d -= cot(lk + li + eta) + cot(lk - li + eta) - cot(lk + li - eta) - cot(lk - li - eta);
                }
            }
            d
        } else {
            let lj = l[j];
            -(cot(lk + lj + eta) - cot(lk - lj + eta) - cot(lk + lj - eta) + cot(lk - lj - eta))
        }
    })
}

/// Sorted `x_k`; invariant under sign flips, permutations and shifts by `π`.
fn canonical_key(roots: &BetheRoots) -> Vec<C64> {
    let mut x = roots.x.clone();
    x.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    x
}

/// Multistart Newton on the trigonometric Bethe system.
pub fn bethe_newton_solve(
    s: &[C64],
    eta: C64,
    n: usize,
    starts: &[Vec<C64>],
    opts: &SolverOptions,
) -> Result<NewtonReport> {
    if n == 0 {
        return Ok(NewtonReport {
            solutions: vec![BetheSolution {
                roots: from_x(Vec::new()),
                newton_iterations: 0,
                branch: Vec::new(),
            }],
            diagnostics: NewtonDiagnostics {
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
    let ln_lhs = |l: &[C64], k: usize| Some(ln_spin(l[k], s, eta)? - ln_pair(l, k, eta)?);
    let jac = |l: &[C64]| xxz_jacobian(l, s, eta);
    let sys = LogSystem {
        ln_lhs: &ln_lhs,
        jac: &jac,
    };
    let outcomes: Vec<Option<NewtonOutcome>> = starts
        .par_iter()
        .map(|st| sys.run(st, opts.tolerance, opts.max_iter))
        .collect();
    let finish = |o: &NewtonOutcome| {
        let x: Vec<C64> = o.point.iter().map(|l| (2.0 * l).cos()).collect();
        let mut roots = from_x(x);
        roots.lambdas = o.point.clone();
        roots.with_xxz_residuals(s, eta)
    };
    collect_newton(outcomes, opts, finish)
}

pub(crate) fn collect_newton(
    outcomes: Vec<Option<NewtonOutcome>>,
    opts: &SolverOptions,
    finish: impl Fn(&NewtonOutcome) -> BetheRoots,
) -> Result<NewtonReport> {
    let starts = outcomes.len();
    let mut diagnostics = NewtonDiagnostics {
        starts,
        ..Default::default()
    };
    let mut found: Vec<(Vec<C64>, f64, BetheSolution)> = Vec::new();
    for o in outcomes.into_iter().flatten() {
        if !o.converged {
            diagnostics.best_unconverged = Some(
                diagnostics
                    .best_unconverged
                    .map_or(o.residual, |b: f64| b.min(o.residual)),
            );
            continue;
        }
        let roots = finish(&o);
        let worst = match roots.max_residual() {
            Some(w) if w <= opts.tolerance.max(10.0 * o.residual) => w,
            _ => continue,
        };
        diagnostics.converged += 1;
        let key = canonical_key(&roots);
        if let Some(e) = found
            .iter_mut()
            .find(|(k, _, _)| poly::multiset_distance(k, &key) < opts.dedup)
        {
            if worst < e.1 {
                e.1 = worst;
                e.2 = BetheSolution {
                    roots,
                    newton_iterations: o.iterations,
                    branch: o.branch,
                };
            }
            continue;
        }
        found.push((
            key,
            worst,
            BetheSolution {
                roots,
                newton_iterations: o.iterations,
                branch: o.branch,
            },
        ));
    }
    found.sort_by(|a, b| {
        a.1.total_cmp(&b.1).then_with(|| {
            for (x, y) in a.0.iter().zip(&b.0) {
                let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
    });
    diagnostics.distinct = found.len();
    Ok(NewtonReport {
        solutions: found.into_iter().map(|f| f.2).collect(),
        diagnostics,
    })
}

/// `λ` starts from root sets in `x`.
pub fn lambda_starts(x_sets: &[Vec<C64>]) -> Vec<Vec<C64>> {
    x_sets
        .iter()
        .map(|xs| xs.iter().map(|&x| lambda_of(x)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn extract_examples() {
        let r = extract_lambdas(&Poly::x()).unwrap();
        assert!((r.lambdas[0] - std::f64::consts::FRAC_PI_4).norm() < 1e-15);
        assert!(!r.flags[0]);
        let r = extract_lambdas(&Poly::from_real(&[-1.0, 1.0])).unwrap();
        assert!(r.lambdas[0].norm() < 1e-12);
        assert!(r.flags[0]);
    }

    #[test]
    fn legendre_ode_residuals() {
        let pi = Poly::from_real(&[1.0, 0.0, -1.0]);
        let phi = Poly::from_real(&[0.0, -2.0]);
        let r = 1.0 / 3f64.sqrt();
        let res = heine_ode_residuals(&[c(-r), c(r)], &pi, &phi).unwrap();
        assert!(res.iter().all(|v| v.norm() < 1e-12));
        assert!(matches!(
            heine_ode_residuals(&[c(0.2), c(0.2)], &pi, &phi),
            Err(Error::CoincidentPoints(0, 1))
        ));
    }

    #[test]
    fn single_root_ode_residual() {
        let pi = Poly::from_real(&[1.0, 0.0, -1.0]);
        let phi = Poly::from_real(&[0.3, -2.0]);
        let x = c(0.4);
        let res = heine_ode_residuals(&[x], &pi, &phi).unwrap();
        assert!((res[0] + phi.eval(x) / (2.0 * pi.eval(x))).norm() < 1e-15);
    }

    #[test]
    fn empty_system() {
        let rep = bethe_newton_solve(&[c(0.5); 4], C64::new(0.0, 0.3), 0, &[], &SolverOptions::default()).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        assert!(rep.solutions[0].roots.lambdas.is_empty());
    }
}
