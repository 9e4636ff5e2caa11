//! `distribution`, `weights` and `indicial`.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use super::config::Model;
use super::json::{cx, cx_list, num, opt_cx_list, SCHEMA};
use super::solve::xxz_params;
use super::Failure;
use crate::bethe;
use crate::qsl::{self, XxzParams};
use crate::singular;
use crate::weights;
use crate::wilson;

/// `½ + arcsin(x)/π`.
pub fn arcsine_cdf(x: f64) -> f64 {
    0.5 + x.clamp(-1.0, 1.0).asin() / std::f64::consts::PI
}

/// Kolmogorov-Smirnov distance between the empirical law of `x` and the
/// arcsine law on `(-1, 1)`.
pub fn ks_arcsine(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let f = arcsine_cdf(xi);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Equal-width bin edges and counts on `[-1, 1]`; values outside are clamped.
pub fn histogram(x: &[f64], bins: usize) -> (Vec<f64>, Vec<usize>) {
    let edges = (0..=bins).map(|k| -1.0 + 2.0 * k as f64 / bins as f64).collect();
    let mut counts = vec![0; bins];
    for &v in x {
        let k = (((v + 1.0) / 2.0) * bins as f64).floor();
        counts[(k.max(0.0) as usize).min(bins - 1)] += 1;
    }
    (edges, counts)
}

pub(crate) fn distribution(eta: C64, spins: &[C64], n: usize, bins: usize) -> Result<Value, Failure> {
    let s: [C64; 4] = spins
        .try_into()
        .map_err(|_| Failure::Input(format!("distribution needs 4 spins, got {}", spins.len())))?;
    if n == 0 || bins == 0 {
        return Err(Failure::Input("--n and --bins must be positive".into()));
    }
    let x = qsl::aw_zeros(n, &s, eta)?;
    // Jacobi eigenvalues are accurate even where zeros crowd near ±1, so no
    // collision masking here.
    let lambdas: Vec<C64> = x.iter().map(|v| 0.5 * v.acos()).collect();
    let residuals = bethe::xxz_residuals(&lambdas, &s, eta);
    let re: Vec<f64> = x.iter().map(|v| v.re).collect();
    let (edges, counts) = histogram(&re, bins);
    Ok(json!({
        "schema": SCHEMA,
        "model": "xxz",
        "params": { "eta": cx(eta), "spins": cx_list(&s), "N": 2, "n": n },
        "x": cx_list(&x),
        "lambdas": cx_list(&lambdas),
        "residuals": opt_cx_list(&residuals),
        "histogram": { "edges": edges, "counts": counts },
        "ks_distance": num(ks_arcsine(&re)),
    }))
}

pub(crate) struct WeightsRequest {
    pub model: Model,
    pub eta: Option<C64>,
    pub q: Option<C64>,
    pub a: Option<Vec<C64>>,
    pub spins: Option<Vec<C64>>,
    pub l: Option<usize>,
    pub spin: f64,
    pub points: Option<Vec<f64>>,
}

pub(crate) fn weights(req: &WeightsRequest) -> Result<Value, Failure> {
    match req.model {
        Model::Xxz => {
            let params = xxz_params(req.eta, req.q, &req.spins, &req.a)?;
            let points = req
                .points
                .clone()
                .unwrap_or_else(|| (0..9).map(|k| -0.8 + 0.2 * k as f64).collect());
            if let Some(x) = points.iter().find(|x| !(x.abs() <= 1.0)) {
                return Err(Failure::Input(format!("x = {x} lies outside [-1, 1]")));
            }
            let rows = points
                .iter()
                .map(|&x| {
                    let w = weights::xxz_weight(x, &params).map_err(|e| Failure::Input(e.to_string()))?;
                    Ok(json!({ "x": num(x), "w": cx(w) }))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok(json!({
                "schema": SCHEMA,
                "model": "xxz",
                "params": { "q": cx(params.q.q()), "a": cx_list(&params.a), "N": params.n_half() },
                "points": rows,
            }))
        }
        Model::Xxx => {
            let (s, closed) = match (&req.spins, req.l) {
                (Some(s), None) => (s.clone(), None),
                (None, Some(l)) => {
                    let (p, _) = wilson::xxx_ground_config(l, req.spin)?;
                    (p.s, ((req.spin - 0.5).abs() < 1e-15).then_some(l))
                }
                _ => return Err(Failure::Input("give exactly one of --L and --spins".into())),
            };
            if s.iter().any(|v| v.im != 0.0) {
                return Err(Failure::Input("xxx weights need real spins".into()));
            }
            let sr: Vec<f64> = s.iter().map(|v| v.re).collect();
            let points = req
                .points
                .clone()
                .unwrap_or_else(|| (1..=8).map(|k| 0.25 * k as f64).collect());
            let rows = points
                .iter()
                .map(|&y| {
                    let w = weights::xxx_weight(y, &sr).map_err(|e| Failure::Input(e.to_string()))?;
                    let mut row = json!({ "y": num(y), "x": num(y * y), "w": num(w) });
                    if let Some(l) = closed {
                        row["closed_form"] = num(weights::xxx_half_spin_weight(l, y)?);
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut params = json!({ "spins": sr, "N": sr.len() / 2 });
            if let Some(l) = req.l {
                params["L"] = json!(l);
                params["spin"] = num(req.spin);
            }
            Ok(json!({
                "schema": SCHEMA,
                "model": "xxx",
                "params": params,
                "points": rows,
            }))
        }
        Model::HeineOde => Err(Failure::Input("weights are defined for xxz and xxx only".into())),
    }
}

/// `pivot` counts from 1.
pub(crate) fn indicial(params: &XxzParams, pivot: usize) -> Result<Value, Failure> {
    if pivot == 0 || pivot > params.a.len() {
        return Err(Failure::Input(format!(
            "pivot must lie in 1..={}, got {pivot}",
            params.a.len()
        )));
    }
    let r = singular::indicial_exponents(params, pivot - 1)?;
    Ok(json!({
        "schema": SCHEMA,
        "params": { "q": cx(params.q.q()), "a": cx_list(&params.a), "N": params.n_half() },
        "pivot": pivot,
        "exponents": cx_list(&r.exponents),
        "residuals": cx_list(&r.residual),
        "complete": r.complete,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let x: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::PI * ((i as f64 + 0.5) / n as f64 - 0.5)).sin())
            .collect();
        assert!(ks_arcsine(&x) <= 0.5 / n as f64 + 1e-12);
        assert!((ks_arcsine(&[0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn histogram_counts_everything() {
        let (edges, counts) = histogram(&[-1.0, -0.2, 0.0, 0.99, 1.0], 4);
        assert_eq!(edges.len(), 5);
        assert_eq!(counts, vec![1, 1, 1, 2]);
    }
}
