//! Polynomial eigenfunctions of second-order operators with polynomial
//! coefficients: find monic `y` of degree `n` and `r` with `L(y) = r y`.
//!
//! The unknowns are the `n` free coefficients of `y` and the coefficients of
//! `r`; the equations are the coefficients of the defect `L(y) - r y`. The
//! system is bilinear, so the Jacobian is exact and cheap once `L(x^i)` is
//! tabulated.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{self, Poly};

/// A linear operator on polynomials that raises the degree by at most `r_degree`.
pub trait PolyOperator: Sync {
    fn apply(&self, f: &Poly) -> Result<Poly>;

    /// Maximal degree of the eigenvalue polynomial `r`.
    fn r_degree(&self) -> usize;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Acceptance threshold on the scaled defect (see [`Solution::scaled_residual`]).
    pub tolerance: f64,
    pub starts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Root-multiset distance below which two solutions are the same.
    pub dedup: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            starts: 32,
            seed: 0,
            max_iter: 60,
            dedup: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum SolutionFlag {
    /// The Jacobian is numerically singular at the converged point.
    Degenerate,
    /// Two roots of `y` closer than [`COLLISION`].
    RootCollision,
    /// A root at `x = ±1`, where `sin 2λ = 0`.
    BoundaryRoot,
    /// A root at `x = 0`, i.e. `f(0) = 0`.
    ZeroRoot,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Monic, degree `n`.
    pub y: Poly,
    pub r: Poly,
    pub roots: Vec<C64>,
    /// Largest coefficient magnitude of `L(y) - r y`.
    pub residual_norm: f64,
    /// `residual_norm / max(1, max|L(y)|)`; compared with the tolerance.
    pub scaled_residual: f64,
    pub newton_iterations: usize,
    pub flags: Vec<SolutionFlag>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub starts: usize,
    pub converged: usize,
    pub distinct: usize,
    pub heine_bound: u64,
    /// Smallest scaled residual reached by a start that did not converge.
    pub best_unconverged: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<Solution>,
    pub diagnostics: Diagnostics,
}

/// Roots closer than this (relative) count as one multiple root. A double
/// root moves by the square root of the coefficient error, so a converged
/// solution with coefficients good to `1e-7` can show a split near `1e-3`.
pub const COLLISION: f64 = 1e-3;

/// `C(N + n - 2, N - 2)` with `N - 2 = r_degree`.
pub fn heine_bound(r_degree: usize, n: usize) -> u64 {
    let k = r_degree as u64;
    let mut b: u64 = 1;
    for i in 1..=k {
        b = b * (n as u64 + i) / i;
    }
    b
}

/// Tabulated `L(x^i)`, `i = 0..=n`, padded to the defect length.
struct Table {
    n: usize,
    m: usize,
    images: Vec<Vec<C64>>,
}

impl Table {
    fn new(op: &dyn PolyOperator, n: usize) -> Result<Self> {
        let m = op.r_degree();
        let len = n + m + 1;
        let images = (0..=n)
            .map(|i| Ok(op.apply(&Poly::monomial(i, C64::new(1.0, 0.0)))?.padded(len)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n, m, images })
    }

    fn len(&self) -> usize {
        self.n + self.m + 1
    }

    /// `y` coefficients from the free ones.
    fn y(&self, c: &[C64]) -> Vec<C64> {
        let mut y = c.to_vec();
        y.push(C64::new(1.0, 0.0));
        y
    }

    fn ly(&self, c: &[C64]) -> Vec<C64> {
        let mut out = self.images[self.n].clone();
        for (i, &ci) in c.iter().enumerate() {
            for (o, &v) in out.iter_mut().zip(&self.images[i]) {
                *o += ci * v;
            }
        }
        out
    }

    fn defect(&self, c: &[C64], d: &[C64]) -> (Vec<C64>, f64) {
        let mut out = self.ly(c);
        let scale = out.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let y = self.y(c);
        for (j, &dj) in d.iter().enumerate() {
            for (i, &yi) in y.iter().enumerate() {
                out[i + j] -= dj * yi;
            }
        }
        (out, scale)
    }

    fn jacobian(&self, c: &[C64], d: &[C64]) -> DMatrix<C64> {
        let len = self.len();
        let mut jac = DMatrix::<C64>::zeros(len, self.n + self.m + 1);
        for i in 0..self.n {
            for row in 0..len {
                jac[(row, i)] = self.images[i][row];
            }
            for (j, &dj) in d.iter().enumerate() {
                jac[(i + j, i)] -= dj;
            }
        }
        let y = self.y(c);
        for j in 0..=self.m {
            for (i, &yi) in y.iter().enumerate() {
                jac[(i + j, self.n + j)] -= yi;
            }
        }
        jac
    }

    /// Least-squares `r` for fixed `y`.
    fn best_r(&self, c: &[C64]) -> Vec<C64> {
        let len = self.len();
        let y = self.y(c);
        let mut b = DMatrix::<C64>::zeros(len, self.m + 1);
        for j in 0..=self.m {
            for (i, &yi) in y.iter().enumerate() {
                b[(i + j, j)] = yi;
            }
        }
        let rhs = DVector::from_vec(self.ly(c));
        b.svd(true, true)
            .solve(&rhs, 1e-14)
            .map(|v| v.iter().copied().collect())
            .unwrap_or_else(|_| vec![C64::new(0.0, 0.0); self.m + 1])
    }
}

fn max_norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

struct Attempt {
    c: Vec<C64>,
    d: Vec<C64>,
    residual: f64,
    scaled: f64,
    iterations: usize,
}

fn newton(table: &Table, start_roots: &[C64], opts: &SolverOptions) -> Option<Attempt> {
    let y0 = Poly::from_roots(start_roots, C64::new(1.0, 0.0)).ok()?;
    let mut c: Vec<C64> = y0.padded(table.n + 1)[..table.n].to_vec();
    let mut d = table.best_r(&c);
    let (f, scale) = table.defect(&c, &d);
    let mut res = max_norm(&f) / scale;
    let mut iterations = 0;
    let mut stalled = 0;
    while iterations < opts.max_iter {
        if res <= opts.tolerance * 1e-3 {
            break;
        }
        let (f, _) = table.defect(&c, &d);
        let jac = table.jacobian(&c, &d);
        let rhs = -DVector::from_vec(f);
        let step = match jac.clone().lu().solve(&rhs) {
            Some(s) if s.iter().all(|v| v.re.is_finite() && v.im.is_finite()) => s,
            _ => jac.svd(true, true).solve(&rhs, 1e-14).ok()?,
        };
        iterations += 1;
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..12 {
            let nc: Vec<C64> = c.iter().zip(step.iter()).map(|(a, s)| a + s * alpha).collect();
            let nd: Vec<C64> = d
                .iter()
                .zip(step.iter().skip(table.n))
                .map(|(a, s)| a + s * alpha)
                .collect();
            let (nf, nscale) = table.defect(&nc, &nd);
            let nres = max_norm(&nf) / nscale;
            if nres.is_finite() && (nres < res || alpha < 1e-3) {
                accepted = Some((nc, nd, nres));
                break;
            }
            alpha *= 0.5;
        }
        let (nc, nd, nres) = accepted?;
        if nres >= res * 0.9 {
            stalled += 1;
        } else {
            stalled = 0;
        }
        c = nc;
        d = nd;
        res = nres;
        if stalled >= 4 {
            break;
        }
        if !c.iter().all(|v| v.norm() < 1e12) {
            return None;
        }
    }
    let (f, scale) = table.defect(&c, &d);
    let residual = max_norm(&f);
    Some(Attempt {
        c,
        d,
        residual,
        scaled: residual / scale,
        iterations,
    })
}

/// Chebyshev points of the first kind on `(-1, 1)`.
pub fn chebyshev_points(n: usize) -> Vec<C64> {
    (1..=n)
        .map(|k| C64::new(((2 * k - 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos(), 0.0))
        .collect()
}

/// Starting root sets: Chebyshev points, caller hints, then seeded random
/// points in the disk of radius 1.2, `opts.starts` in total (at least one).
pub fn starting_points(n: usize, hints: &[Vec<C64>], opts: &SolverOptions) -> Vec<Vec<C64>> {
    let total = opts.starts.max(1);
    let mut out = vec![chebyshev_points(n)];
    out.extend(hints.iter().filter(|h| h.len() == n).cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while out.len() < total {
        out.push(
            (0..n)
                .map(|_| {
                    let r = 1.2 * rng.gen::<f64>().sqrt();
                    let t = rng.gen::<f64>() * std::f64::consts::TAU;
                    C64::from_polar(r, t)
                })
                .collect(),
        );
    }
    out
}

/// Multistart Newton for `L(y) = r y` with `y` monic of degree `n`.
pub fn solve(op: &dyn PolyOperator, n: usize, hints: &[Vec<C64>], opts: &SolverOptions) -> Result<SolveReport> {
    let m = op.r_degree();
    let bound = heine_bound(m, n);
    if n == 0 {
        let ly = op.apply(&Poly::one())?;
        let residual = ly.max_abs();
        let solutions = if residual <= opts.tolerance {
            vec![Solution {
                y: Poly::one(),
                r: Poly::zero(),
                roots: Vec::new(),
                residual_norm: residual,
                scaled_residual: residual,
                newton_iterations: 0,
                flags: Vec::new(),
            }]
        } else {
            Vec::new()
        };
        return Ok(SolveReport {
            diagnostics: Diagnostics {
                starts: 1,
                converged: solutions.len(),
                distinct: solutions.len(),
                heine_bound: bound,
                best_unconverged: None,
            },
            solutions,
        });
    }
    let table = Table::new(op, n)?;
    let starts = starting_points(n, hints, opts);
    let attempts: Vec<Option<Attempt>> = starts.par_iter().map(|s| newton(&table, s, opts)).collect();

    let mut solutions: Vec<Solution> = Vec::new();
    let mut converged = 0;
    let mut best_unconverged: Option<f64> = None;
    for attempt in attempts.into_iter().flatten() {
        if !(attempt.scaled <= opts.tolerance) {
            if attempt.scaled.is_finite() {
                best_unconverged = Some(best_unconverged.map_or(attempt.scaled, |b: f64| b.min(attempt.scaled)));
            }
            continue;
        }
        converged += 1;
        let y = Poly::raw(table.y(&attempt.c));
        let roots = match y.roots() {
            Ok(r) => r.roots,
            Err(_) => continue,
        };
        let sol = finish(&table, attempt, y, roots);
        if let Some(existing) = solutions.iter_mut().find(|s| same_solution(s, &sol, opts.dedup)) {
            if sol.scaled_residual < existing.scaled_residual {
                *existing = sol;
            }
            continue;
        }
        solutions.push(sol);
    }
    solutions.sort_by(|a, b| {
        a.scaled_residual
            .total_cmp(&b.scaled_residual)
            .then_with(|| lex_cmp(&a.roots, &b.roots))
    });
    // Continuous families (singular Jacobian) are not covered by the count.
    let isolated = solutions
        .iter()
        .filter(|s| !s.flags.contains(&SolutionFlag::Degenerate))
        .count();
    if isolated as u64 > bound {
        return Err(Error::HeineBoundExceeded { found: isolated, bound });
    }
    Ok(SolveReport {
        diagnostics: Diagnostics {
            starts: starts.len(),
            converged,
            distinct: solutions.len(),
            heine_bound: bound,
            best_unconverged,
        },
        solutions,
    })
}

/// Same root multiset, or the same `y` coefficient-wise: multiple roots are
/// poorly resolved, their coefficients are not. Near a singular Jacobian
/// Newton only gets within `sqrt(tol)`, so degenerate pairs use that.
fn same_solution(a: &Solution, b: &Solution, tol: f64) -> bool {
    let degenerate = |s: &Solution| s.flags.contains(&SolutionFlag::Degenerate);
    let tol = if degenerate(a) && degenerate(b) {
        tol.sqrt()
    } else {
        tol
    };
    if poly::multiset_distance(&a.roots, &b.roots) < tol {
        return true;
    }
    let scale = a.y.max_abs().max(1.0);
    (&a.y - &b.y).max_abs() < tol * scale
}

fn lex_cmp(a: &[C64], b: &[C64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

fn finish(table: &Table, attempt: Attempt, y: Poly, roots: Vec<C64>) -> Solution {
    let mut flags = Vec::new();
    let sv = table.jacobian(&attempt.c, &attempt.d).singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smin <= 1e-12 * smax {
        flags.push(SolutionFlag::Degenerate);
    }
    if poly::collisions(&roots, COLLISION).contains(&true) {
        flags.push(SolutionFlag::RootCollision);
    }
    Solution {
        y,
        r: Poly::raw(attempt.d.clone()),
        roots,
        residual_norm: attempt.residual,
        scaled_residual: attempt.scaled,
        newton_iterations: attempt.iterations,
        flags,
    }
}

/// `Π y'' + Φ y'`, the classical Heine-Stieltjes operator.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalOperator {
    pub pi: Poly,
    pub phi: Poly,
}

impl PolyOperator for ClassicalOperator {
    fn apply(&self, f: &Poly) -> Result<Poly> {
        let d1 = f.derivative();
        let d2 = d1.derivative();
        Ok(&(&self.pi * &d2) + &(&self.phi * &d1))
    }

    fn r_degree(&self) -> usize {
        self.pi
            .degree()
            .saturating_sub(2)
            .max(self.phi.degree().saturating_sub(1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heine_bound_values() {
        assert_eq!(heine_bound(0, 7), 1);
        assert_eq!(heine_bound(1, 2), 3);
        assert_eq!(heine_bound(2, 3), 10);
    }

    #[test]
    fn legendre_from_classical_operator() {
        let op = ClassicalOperator {
            pi: Poly::from_real(&[1.0, 0.0, -1.0]),
            phi: Poly::from_real(&[0.0, -2.0]),
        };
        let rep = solve(&op, 2, &[], &SolverOptions::default()).unwrap();
        assert_eq!(rep.solutions.len(), 1);
        let s = &rep.solutions[0];
        let r3 = 1.0 / 3f64.sqrt();
        assert!((s.roots[0].re + r3).abs() < 1e-12 && (s.roots[1].re - r3).abs() < 1e-12);
        // eigenvalue of the degree-2 Legendre polynomial
        assert!((s.r.coeff(0) + 6.0).norm() < 1e-10);
    }

    #[test]
    fn degree_zero_is_trivial() {
        let op = ClassicalOperator {
            pi: Poly::from_real(&[1.0, 0.0, -1.0]),
            phi: Poly::from_real(&[0.0, -2.0]),
        };
        let rep = solve(&op, 0, &[], &SolverOptions::default()).unwrap();
        assert_eq!(rep.solutions[0].y, Poly::one());
        assert!(rep.solutions[0].r.is_zero());
    }

    #[test]
    fn starts_are_deterministic() {
        let o = SolverOptions::default();
        assert_eq!(starting_points(4, &[], &o), starting_points(4, &[], &o));
        assert_eq!(starting_points(4, &[], &o).len(), o.starts);
    }
}
