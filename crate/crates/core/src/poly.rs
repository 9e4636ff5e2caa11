//! Dense complex polynomials, two-sided Laurent polynomials in `z` with
//! `x = (z + 1/z)/2`, Chebyshev basis conversion, and root finding.
//!
//! Everything downstream (the Askey-Wilson and Wilson operator calculus, the
//! Heine-Stieltjes solver, the Bethe residual evaluators) is built on the two
//! carriers defined here.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Relative magnitude below which trailing coefficients are dropped.
pub const ZERO_THRESHOLD: f64 = 1e-13;

/// Numeric knobs shared by the polynomial routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyOptions {
    /// Trailing coefficients with magnitude `<= zero_threshold * max|c|` are trimmed.
    pub zero_threshold: f64,
    /// Relative step size at which the simultaneous iteration stops.
    pub root_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PolyOptions {
    fn default() -> Self {
        Self {
            zero_threshold: ZERO_THRESHOLD,
            root_tolerance: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Chebyshev family used by [`Poly::cheb_decompose`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChebKind {
    /// `T_n(cos t) = cos(n t)`
    First,
    /// `U_n(cos t) = sin((n+1) t) / sin t`
    Second,
}

/// Univariate polynomial with complex coefficients in the monomial basis
/// (`coeffs[k]` multiplies `x^k`).
///
/// The zero polynomial has an empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self::with_threshold(coeffs, ZERO_THRESHOLD)
    }

    pub fn with_threshold(mut coeffs: Vec<C64>, threshold: f64) -> Self {
        trim(&mut coeffs, threshold);
        Self { coeffs }
    }

    /// Wraps the vector as-is; only exact zeros at the top are removed.
    pub fn raw(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::raw(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(1, C64::new(1.0, 0.0))
    }

    pub fn monomial(k: usize, c: C64) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::raw(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn eval_real(&self, x: f64) -> C64 {
        self.eval(C64::new(x, 0.0))
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::raw(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn monic(&self) -> Result<Self> {
        let lead = self.leading();
        if lead == C64::new(0.0, 0.0) {
            return Err(Error::ZeroLeading);
        }
        Ok(self.scale(1.0 / lead))
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self::raw(coeffs)
    }

    /// `self(inner(x))` by Horner's scheme.
    pub fn compose(&self, inner: &Poly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| &(&acc * inner) + &Poly::constant(c))
    }

    /// Coefficient vector padded (or truncated) to `len` entries.
    pub fn padded(&self, len: usize) -> Vec<C64> {
        let mut v = self.coeffs.clone();
        v.resize(len, C64::new(0.0, 0.0));
        v
    }

    /// Expands `leading * prod (x - r)`.
    pub fn from_roots(roots: &[C64], leading: C64) -> Result<Self> {
        if leading == C64::new(0.0, 0.0) {
            return Err(Error::ZeroLeading);
        }
        let mut coeffs = vec![leading];
        for &r in roots {
            let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        Ok(Self::raw(coeffs))
    }

    pub fn roots(&self) -> Result<ComplexRootSet> {
        poly_roots(self, &PolyOptions::default())
    }

    /// Coefficients `c_k` with `self = sum c_k T_k` (or `U_k`).
    pub fn cheb_decompose(&self, kind: ChebKind) -> Vec<C64> {
        // Horner in the Chebyshev basis: c <- x*c + a_k.
        let mut c: Vec<C64> = Vec::new();
        for &a in self.coeffs.iter().rev() {
            let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
            for (j, &cj) in c.iter().enumerate() {
                match (kind, j) {
                    (ChebKind::First, 0) => next[1] += cj,
                    _ => {
                        next[j + 1] += cj * 0.5;
                        if j >= 1 {
                            next[j - 1] += cj * 0.5;
                        }
                    }
                }
            }
            next[0] += a;
            c = next;
        }
        c
    }

    /// Inverse of [`Poly::cheb_decompose`].
    pub fn from_cheb(coeffs: &[C64], kind: ChebKind) -> Self {
        let n = coeffs.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (k, basis) in cheb_basis_monomials(n, kind).iter().enumerate() {
            for (j, &b) in basis.iter().enumerate() {
                if b != 0.0 {
                    out[j] += coeffs[k] * b;
                }
            }
        }
        Self::new(out)
    }

    /// The symmetric Laurent polynomial `f((z + 1/z)/2)`.
    pub fn to_laurent(&self) -> LaurentPoly {
        let t = self.cheb_decompose(ChebKind::First);
        let mut map = BTreeMap::new();
        for (k, &c) in t.iter().enumerate() {
            if k == 0 {
                map.insert(0, c);
            } else {
                map.insert(k as i32, c * 0.5);
                map.insert(-(k as i32), c * 0.5);
            }
        }
        LaurentPoly::from_map(map)
    }
}

/// Monomial coefficients of `T_0..T_{n-1}` (or `U_k`), generated exactly by
/// the integer three-term recurrence.
fn cheb_basis_monomials(n: usize, kind: ChebKind) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let row = match k {
            0 => vec![1.0],
            1 => match kind {
                ChebKind::First => vec![0.0, 1.0],
                ChebKind::Second => vec![0.0, 2.0],
            },
            _ => {
                let mut row = vec![0.0; k + 1];
                for (j, &c) in out[k - 1].iter().enumerate() {
                    row[j + 1] += 2.0 * c;
                }
                for (j, &c) in out[k - 2].iter().enumerate() {
                    row[j] -= c;
                }
                row
            }
        };
        out.push(row);
    }
    out
}

fn trim(coeffs: &mut Vec<C64>, threshold: f64) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cut = threshold * scale;
    while coeffs.last().is_some_and(|c| c.norm() <= cut) {
        coeffs.pop();
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::raw(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})x"),
                _ => format!("({c})x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `1 + e_1 t + ... + e_m t^m = prod (1 + v_j t)`; returns `(e_0, ..., e_m)`.
pub fn elem_sym(values: &[C64]) -> Vec<C64> {
    let mut e = vec![C64::new(1.0, 0.0)];
    for &v in values {
        e.push(C64::new(0.0, 0.0));
        for k in (1..e.len()).rev() {
            let prev = e[k - 1];
            e[k] += v * prev;
        }
    }
    e
}

/// A two-sided Laurent polynomial in `z`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, C64>,
}

impl LaurentPoly {
    pub fn from_map(mut coeffs: BTreeMap<i32, C64>) -> Self {
        coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn from_terms(terms: &[(i32, C64)]) -> Self {
        let mut map = BTreeMap::new();
        for &(k, c) in terms {
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Self::from_map(map)
    }

    pub fn coeff(&self, k: i32) -> C64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().map(|(&k, &c)| c * z.powi(k)).sum()
    }

    /// Substitution `z -> c z`: multiplies `coeff[k]` by `c^k`.
    pub fn substitute_scaled(&self, c: C64) -> Self {
        Self::from_map(self.coeffs.iter().map(|(&k, &a)| (k, a * c.powi(k))).collect())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_map(self.coeffs.iter().map(|(&k, &a)| (k, a * c)).collect())
    }

    /// `coeff[k] == coeff[-k]` within `tol` relative to the largest coefficient.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        self.coeffs
            .iter()
            .all(|(&k, &c)| (c - self.coeff(-k)).norm() <= tol * scale)
    }

    /// Reads a symmetric Laurent polynomial back as a polynomial in `x`.
    /// Asymmetric input is symmetrised (`c_k = coeff[k] + coeff[-k]`).
    pub fn to_poly(&self) -> Poly {
        let top = self.coeffs.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut t = vec![C64::new(0.0, 0.0); top + 1];
        t[0] = self.coeff(0);
        for (k, tk) in t.iter_mut().enumerate().skip(1) {
            *tk = self.coeff(k as i32) + self.coeff(-(k as i32));
        }
        Poly::from_cheb(&t, ChebKind::First)
    }

    /// Exact division by `z - 1/z`. Fails when the remainder is not negligible.
    pub fn div_z_minus_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::default());
        }
        // self = z^{lo} g(z) with g an ordinary polynomial; z - 1/z = z^{-1}(z^2 - 1).
        let lo = *self.coeffs.keys().next().unwrap();
        let hi = *self.coeffs.keys().next_back().unwrap();
        let mut g: Vec<C64> = (lo..=hi).map(|k| self.coeff(k)).collect();
        let scale = self.max_abs();
        if g.len() < 3 {
            let rem = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
            return Err(Error::InexactDivision { remainder: rem, scale });
        }
        // Synthetic division by z^2 - 1 from the top.
        let m = g.len() - 1;
        let mut quot = vec![C64::new(0.0, 0.0); m - 1];
        for k in (2..=m).rev() {
            let c = g[k];
            quot[k - 2] = c;
            g[k - 2] += c;
            g[k] = C64::new(0.0, 0.0);
        }
        let rem = g[0].norm().max(g[1].norm());
        if rem > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InexactDivision { remainder: rem, scale });
        }
        // Quotient q(z) z^{lo} * z = (self) / (z - 1/z).
        Ok(Self::from_map(
            quot.into_iter()
                .enumerate()
                .map(|(k, c)| (k as i32 + lo + 1, c))
                .collect(),
        ))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut map = self.coeffs.clone();
        for (&k, &c) in &rhs.coeffs {
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        LaurentPoly::from_map(map)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut map = self.coeffs.clone();
        for (&k, &c) in &rhs.coeffs {
            *map.entry(k).or_insert(C64::new(0.0, 0.0)) -= c;
        }
        LaurentPoly::from_map(map)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut map = BTreeMap::new();
        for (&i, &a) in &self.coeffs {
            for (&j, &b) in &rhs.coeffs {
                *map.entry(i + j).or_insert(C64::new(0.0, 0.0)) += a * b;
            }
        }
        LaurentPoly::from_map(map)
    }
}

/// Roots of a polynomial together with the achieved backward residual.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRootSet {
    /// Sorted lexicographically by real, then imaginary part.
    pub roots: Vec<C64>,
    /// `max_k |f(root_k)| / max|coeff|`.
    pub tolerance: f64,
}

pub fn poly_roots(f: &Poly, opts: &PolyOptions) -> Result<ComplexRootSet> {
    let f = Poly::with_threshold(f.coeffs.clone(), opts.zero_threshold);
    if f.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let scale = f.max_abs();
    // Exact zero roots are split off first.
    let zeros = f.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = Poly::raw(f.coeffs[zeros..].to_vec());
    let mut roots = vec![C64::new(0.0, 0.0); zeros];

    if reduced.degree() > 0 {
        let monic = reduced.scale(1.0 / reduced.leading());
        let found = match aberth(&monic, opts) {
            Some(r) => r,
            None => companion_roots(&monic).ok_or_else(|| Error::RootsNotConverged {
                iterations: opts.max_iterations,
                residual: f64::INFINITY,
                best: Vec::new(),
            })?,
        };
        roots.extend(found.into_iter().map(|z| polish(&monic, z)));
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let tolerance = roots.iter().map(|&z| f.eval(z).norm() / scale).fold(0.0, f64::max);
    Ok(ComplexRootSet { roots, tolerance })
}

/// Magnitude of `f(z)` attributable to rounding in Horner's scheme.
fn rounding_bound(f: &Poly, z: C64) -> f64 {
    let r = z.norm();
    let s = f.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    8.0 * f64::EPSILON * s * (f.coeffs.len() as f64)
}

fn aberth(f: &Poly, opts: &PolyOptions) -> Option<Vec<C64>> {
    let n = f.degree();
    let df = f.derivative();
    let a = f.coeffs();
    // Fujiwara-style radius for the starting circle.
    let radius = (1..=n)
        .map(|k| a[n - k].norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..opts.max_iterations {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let p = f.eval(z[i]);
            if p.norm() <= rounding_bound(f, z[i]) {
                done[i] = true;
                continue;
            }
            let ratio = p / df.eval(z[i]);
            let sum: C64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            z[i] -= w;
            if w.norm() <= opts.root_tolerance * (1.0 + z[i].norm()) {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            return Some(z);
        }
    }
    None
}

fn companion_roots(f: &Poly) -> Option<Vec<C64>> {
    let n = f.degree();
    let a = f.coeffs();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -a[i];
    }
    let schur = m.try_schur(1e-15, 10_000)?;
    let (_, t) = schur.unpack();
    Some((0..n).map(|i| t[(i, i)]).collect())
}

fn polish(f: &Poly, mut z: C64) -> C64 {
    let df = f.derivative();
    for _ in 0..3 {
        let p = f.eval(z);
        if p.norm() <= rounding_bound(f, z) {
            break;
        }
        let d = df.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - p / d;
        if f.eval(next).norm() >= p.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Distance between two multisets of equal size under a greedy nearest
/// matching: the largest matched pair distance.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("sizes match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Marks roots that have a neighbour closer than `rel * max(1, |r|)`.
pub fn collisions(roots: &[C64], rel: f64) -> Vec<bool> {
    let mut out = vec![false; roots.len()];
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < rel * roots[i].norm().max(1.0) {
                out[i] = true;
                out[j] = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn chebyshev_examples() {
        let t2 = Poly::from_real(&[-1.0, 0.0, 2.0]);
        let t = t2.cheb_decompose(ChebKind::First);
        assert!((t[0]).norm() < 1e-15 && t[1].norm() < 1e-15 && (t[2] - c(1.0)).norm() < 1e-15);
        let u = Poly::from_real(&[0.0, 2.0]).cheb_decompose(ChebKind::Second);
        assert!(u[0].norm() < 1e-15 && (u[1] - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn cheb_reconstruction_matches_direct_evaluation() {
        let f = Poly::from_real(&[0.3, -1.2, 0.5, 2.0, -0.7, 0.1, 0.9, -0.4, 0.25, 1.1, -0.6]);
        for kind in [ChebKind::First, ChebKind::Second] {
            let c = f.cheb_decompose(kind);
            for i in 0..20 {
                let x = -1.0 + 2.0 * i as f64 / 19.0;
                let th = x.acos();
                let sum: C64 = c
                    .iter()
                    .enumerate()
                    .map(|(k, &ck)| {
                        let b = match kind {
                            ChebKind::First => (k as f64 * th).cos(),
                            ChebKind::Second if th.sin().abs() < 1e-12 => (k as f64 + 1.0) * x.signum().powi(k as i32),
                            ChebKind::Second => ((k as f64 + 1.0) * th).sin() / th.sin(),
                        };
                        ck * b
                    })
                    .sum();
                assert!((sum - f.eval_real(x)).norm() < 1e-12 * f.max_abs());
            }
        }
    }

    #[test]
    fn roots_examples() {
        let r = Poly::from_real(&[-1.0, 0.0, 1.0]).roots().unwrap();
        assert!((r.roots[0] + 1.0).norm() < 1e-14 && (r.roots[1] - 1.0).norm() < 1e-14);

        let r = Poly::from_real(&[0.0, 0.0, 0.0, 1.0]).roots().unwrap();
        assert_eq!(r.roots, vec![C64::new(0.0, 0.0); 3]);

        let f = Poly::from_roots(&[c(0.3), c(0.7), c(-0.2)], c(1.0)).unwrap();
        let r = f.roots().unwrap();
        for (got, want) in r.roots.iter().zip([-0.2, 0.3, 0.7]) {
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_has_no_roots() {
        assert_eq!(Poly::one().roots(), Err(Error::ConstantPolynomial));
    }

    #[test]
    fn elem_sym_examples() {
        let (a, b) = (C64::new(0.3, 1.0), C64::new(-2.0, 0.5));
        let e = elem_sym(&[a, b]);
        assert_eq!(e, vec![c(1.0), a + b, a * b]);
        assert_eq!(elem_sym(&[]), vec![c(1.0)]);
    }

    #[test]
    fn from_roots_examples() {
        assert_eq!(
            Poly::from_roots(&[c(1.0)], c(1.0)).unwrap(),
            Poly::from_real(&[-1.0, 1.0])
        );
        assert_eq!(Poly::from_roots(&[], c(3.0)).unwrap(), Poly::from_real(&[3.0]));
        assert_eq!(Poly::from_roots(&[c(1.0)], c(0.0)), Err(Error::ZeroLeading));
    }

    #[test]
    fn laurent_division_roundtrip() {
        let f = Poly::from_real(&[0.5, -1.0, 2.0, 0.25]);
        let l = f.to_laurent();
        let z_minus = LaurentPoly::from_terms(&[(1, c(1.0)), (-1, c(-1.0))]);
        let prod = &l * &z_minus;
        let back = prod.div_z_minus_inv().unwrap();
        assert!((&back.to_poly() - &f).max_abs() < 1e-14);
        assert!(l.div_z_minus_inv().is_err());
    }

    #[test]
    fn laurent_substitution_is_exact() {
        let l = LaurentPoly::from_terms(&[(-2, c(1.0)), (3, c(2.0))]);
        let s = l.substitute_scaled(c(2.0));
        assert_eq!(s.coeff(-2), c(0.25));
        assert_eq!(s.coeff(3), c(16.0));
    }
}
