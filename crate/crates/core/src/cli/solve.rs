//! `solve` and `verify`.

use num_complex::Complex64 as C64;
use serde_json::{json, Map, Value};

use super::config::{Model, RunConfig};
use super::json::{self, cx, cx_list, num, opt_cx_list, SCHEMA};
use super::Failure;
use crate::awop::QParam;
use crate::bethe;
use crate::heine::{self, Solution, SolutionFlag, SolveReport};
use crate::poly::{self, Poly};
use crate::qsl::{self, QslProblem, XxzParams};
use crate::wilson::{self, GroundForm, WilsonProblem, XxxParams};

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T, Failure> {
    v.clone().ok_or_else(|| Failure::Input(format!("missing {what}")))
}

/// `η` with `e^{iη}` equal to the principal `√q`.
type ResidualFn = dyn Fn(&[C64]) -> Vec<Option<C64>>;

pub(crate) fn eta_of(q: &QParam) -> C64 {
    q.eta().unwrap_or_else(|| -0.5 * C64::i() * q.q().ln())
}

pub(crate) fn xxz_params(
    eta: Option<C64>,
    q: Option<C64>,
    spins: &Option<Vec<C64>>,
    a: &Option<Vec<C64>>,
) -> Result<XxzParams, Failure> {
    match (spins, a) {
        (Some(s), None) => {
            if q.is_some() {
                return Err(Failure::Input("spins take --eta or --eta-imag, not --q".into()));
            }
            let eta = need(&eta, "--eta or --eta-imag")?;
            Ok(XxzParams::from_spins(eta, s.clone())?)
        }
        (None, Some(a)) => {
            let q = match (q, eta) {
                (Some(q), None) => QParam::new(q)?,
                (None, Some(eta)) => QParam::from_eta(eta),
                _ => return Err(Failure::Input("--a needs exactly one of --q and --eta".into())),
            };
            Ok(XxzParams::from_a(q, a.clone())?)
        }
        _ => Err(Failure::Input("give exactly one of --spins and --a".into())),
    }
}

fn flag_names(flags: &[SolutionFlag]) -> Value {
    serde_json::to_value(flags).expect("flags serialise")
}

/// Degenerate solutions sit in a continuous family; none of their roots are
/// trusted.
fn masked(sol: &Solution, residuals: Vec<Option<C64>>) -> Vec<Option<C64>> {
    if sol.flags.contains(&SolutionFlag::Degenerate) {
        vec![None; residuals.len()]
    } else {
        residuals
    }
}

fn solution_value(sol: &Solution, lambdas: &[C64], residuals: &[Option<C64>]) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("y_coeffs".into(), json::poly(&sol.y));
    m.insert("r_coeffs".into(), json::poly(&sol.r));
    m.insert("lambdas".into(), cx_list(lambdas));
    m.insert("residuals".into(), opt_cx_list(residuals));
    m.insert("flags".into(), flag_names(&sol.flags));
    m.insert("newton_iterations".into(), json!(sol.newton_iterations));
    m.insert("scaled_residual".into(), num(sol.scaled_residual));
    m
}

fn diagnostics(report: &SolveReport) -> Value {
    let d = &report.diagnostics;
    let mut v = json!({
        "starts": d.starts,
        "converged": d.converged,
        "distinct": d.distinct,
        "heine_bound": d.heine_bound,
    });
    if let Some(b) = d.best_unconverged {
        v["best_unconverged"] = num(b);
    }
    v
}

fn report_value(
    model: Model,
    params: Map<String, Value>,
    pi: &Poly,
    phi: &Poly,
    solutions: Vec<Value>,
    diag: Value,
) -> Value {
    json!({
        "schema": SCHEMA,
        "model": model.name(),
        "params": params,
        "pi_coeffs": json::poly(pi),
        "phi_coeffs": json::poly(phi),
        "solutions": solutions,
        "diagnostics": diag,
    })
}

/// The report and whether any solution met the tolerance.
pub(crate) fn solve(cfg: &RunConfig) -> Result<(Value, bool), Failure> {
    let (value, count) = match cfg.model {
        Model::Xxz => solve_xxz(cfg)?,
        Model::Xxx => solve_xxx(cfg)?,
        Model::HeineOde => solve_ode(cfg)?,
    };
    Ok((value, count > 0))
}

fn solve_xxz(cfg: &RunConfig) -> Result<(Value, usize), Failure> {
    let params = xxz_params(cfg.eta, cfg.q, &cfg.spins, &cfg.a)?;
    let n = need(&cfg.n, "--n")?;
    let problem = QslProblem::from_params(&params, n)?;
    let report = qsl::heine_stieltjes_solve(&problem, &cfg.solver)?;
    let eta = eta_of(&params.q);
    let solutions = report
        .solutions
        .iter()
        .map(|sol| {
            let roots = bethe::from_x(sol.roots.clone());
            let raw = match &params.s {
                Some(s) => bethe::xxz_residuals(&roots.lambdas, s, eta),
                None => bethe::general_residuals(&roots.lambdas, &problem.pi, &problem.phi, eta),
            };
            let residuals = masked(sol, bethe::mask(raw, &roots.flags));
            Value::Object(solution_value(sol, &roots.lambdas, &residuals))
        })
        .collect::<Vec<_>>();

    let mut p = Map::new();
    p.insert("q".into(), cx(params.q.q()));
    if params.q.eta().is_some() {
        p.insert("eta".into(), cx(eta));
    }
    if let Some(s) = &params.s {
        p.insert("spins".into(), cx_list(s));
    }
    p.insert("a".into(), cx_list(&params.a));
    p.insert("N".into(), json!(params.n_half()));
    p.insert("n".into(), json!(n));
    let count = solutions.len();
    Ok((
        report_value(
            Model::Xxz,
            p,
            &problem.pi,
            &problem.phi,
            solutions,
            diagnostics(&report),
        ),
        count,
    ))
}

fn solve_xxx(cfg: &RunConfig) -> Result<(Value, usize), Failure> {
    let (params, form) = match (&cfg.spins, cfg.l) {
        (Some(s), None) => (
            XxxParams::new(s.clone())?,
            GroundForm {
                zero_root: false,
                half_factor: true,
                n: need(&cfg.n, "--n")?,
            },
        ),
        (None, Some(l)) => wilson::xxx_ground_config(l, cfg.spin.unwrap_or(0.5))?,
        _ => return Err(Failure::Input("give exactly one of --L and --spins".into())),
    };
    let n = cfg.n.unwrap_or(form.n);
    let problem = WilsonProblem::from_params(&params, n)?;
    let report = wilson::xxx_heine_solve(&problem, &cfg.solver)?;
    let d = wilson::display_normalization(&problem.p, &problem.q);
    let top = problem.p.degree() - 2;
    let solutions = report
        .solutions
        .iter()
        .map(|sol| {
            let roots = wilson::roots_from_y(wilson::y_from_x(&sol.roots), &params.s, form.half_factor);
            let residuals = masked(sol, roots.residuals.clone());
            let mut m = solution_value(sol, &roots.lambdas, &residuals);
            m.insert("eigenvalue".into(), cx(sol.r.coeff(top) * d.unwrap_or(1.0)));
            Value::Object(m)
        })
        .collect::<Vec<_>>();

    let mut p = Map::new();
    if let Some(l) = cfg.l {
        p.insert("L".into(), json!(l));
        p.insert("spin".into(), num(cfg.spin.unwrap_or(0.5)));
    }
    p.insert("spins".into(), cx_list(&params.s));
    p.insert("N".into(), json!(params.n_half));
    p.insert("n".into(), json!(n));
    p.insert("half_factor".into(), json!(form.half_factor));
    p.insert("zero_root".into(), json!(form.zero_root));
    p.insert("normalization".into(), d.map_or(json!(1.0), num));
    let count = solutions.len();
    Ok((
        report_value(Model::Xxx, p, &problem.p, &problem.q, solutions, diagnostics(&report)),
        count,
    ))
}

fn solve_ode(cfg: &RunConfig) -> Result<(Value, usize), Failure> {
    let pi = Poly::new(need(&cfg.pi, "--pi")?);
    let phi = Poly::new(need(&cfg.phi, "--phi")?);
    let n = need(&cfg.n, "--n")?;
    if pi.is_zero() {
        return Err(Failure::Input("Π must be nonzero".into()));
    }
    let report = bethe::classical_solve(&pi, &phi, n, &cfg.solver)?;
    let solutions = report
        .solutions
        .iter()
        .map(|sol| {
            let raw = match bethe::heine_ode_residuals(&sol.roots, &pi, &phi) {
                Ok(r) => r.into_iter().map(Some).collect(),
                Err(_) => vec![None; sol.roots.len()],
            };
            let close = poly::collisions(&sol.roots, heine::COLLISION);
            let residuals = masked(sol, bethe::mask(raw, &close));
            Value::Object(solution_value(sol, &sol.roots, &residuals))
        })
        .collect::<Vec<_>>();
    let mut p = Map::new();
    p.insert("n".into(), json!(n));
    let count = solutions.len();
    Ok((
        report_value(Model::HeineOde, p, &pi, &phi, solutions, diagnostics(&report)),
        count,
    ))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Failure> {
    v.get(key)
        .ok_or_else(|| Failure::Input(format!("report has no {key:?}")))
}

fn cx_field(v: &Value, key: &str) -> Result<Vec<C64>, Failure> {
    json::read_cx_list(field(v, key)?).ok_or_else(|| Failure::Input(format!("{key:?} is not a complex list")))
}

/// Recomputes residuals from the roots stored in a `solve` report. Entries
/// recorded as indeterminate stay indeterminate. Returns the verification
/// report and whether every finite residual is below `threshold`.
pub(crate) fn verify(text: &str, threshold: f64, only: Option<usize>) -> Result<(Value, bool), Failure> {
    let report: Value = serde_json::from_str(text).map_err(|e| Failure::Input(format!("cannot parse report: {e}")))?;
    if field(&report, "schema")?.as_str() != Some(SCHEMA) {
        return Err(Failure::Input(format!("expected schema {SCHEMA:?}")));
    }
    let model: Model = field(&report, "model")?
        .as_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Failure::Input("unknown model".into()))?;
    let params = field(&report, "params")?;
    let solutions = field(&report, "solutions")?
        .as_array()
        .ok_or_else(|| Failure::Input("\"solutions\" is not a list".into()))?;
    if let Some(k) = only {
        if k >= solutions.len() {
            return Err(Failure::Input(format!(
                "no solution {k} in a report of {}",
                solutions.len()
            )));
        }
    }

    let evaluate: Box<ResidualFn> = match model {
        Model::Xxz => {
            let q = json::read_cx(field(params, "q")?).ok_or_else(|| Failure::Input("bad q".into()))?;
            let eta = match params.get("eta") {
                Some(e) => json::read_cx(e).ok_or_else(|| Failure::Input("bad eta".into()))?,
                None => eta_of(&QParam::new(q)?),
            };
            if params.get("spins").is_some() {
                let s = cx_field(params, "spins")?;
                Box::new(move |l| bethe::xxz_residuals(l, &s, eta))
            } else {
                let pi = Poly::new(cx_field(&report, "pi_coeffs")?);
                let phi = Poly::new(cx_field(&report, "phi_coeffs")?);
                Box::new(move |l| bethe::general_residuals(l, &pi, &phi, eta))
            }
        }
        Model::Xxx => {
            let s = cx_field(params, "spins")?;
            let half = field(params, "half_factor")?
                .as_bool()
                .ok_or_else(|| Failure::Input("bad half_factor".into()))?;
            Box::new(move |y| wilson::xxx_residuals(y, &s, half))
        }
        Model::HeineOde => {
            let pi = Poly::new(cx_field(&report, "pi_coeffs")?);
            let phi = Poly::new(cx_field(&report, "phi_coeffs")?);
            Box::new(move |x| match bethe::heine_ode_residuals(x, &pi, &phi) {
                Ok(r) => r.into_iter().map(Some).collect(),
                Err(_) => vec![None; x.len()],
            })
        }
    };

    let mut pass = true;
    let mut overall: Option<f64> = None;
    let mut seen = false;
    let mut out = Vec::new();
    for (k, sol) in solutions.iter().enumerate() {
        if only.is_some_and(|o| o != k) {
            continue;
        }
        let lambdas = cx_field(sol, "lambdas")?;
        let recorded = match sol.get("residuals") {
            Some(r) => json::read_opt_cx_list(r).ok_or_else(|| Failure::Input("bad residuals".into()))?,
            None => vec![Some(C64::new(0.0, 0.0)); lambdas.len()],
        };
        if recorded.len() != lambdas.len() {
            return Err(Failure::Input(format!("solution {k}: residual and root counts differ")));
        }
        let residuals: Vec<Option<C64>> = evaluate(&lambdas)
            .into_iter()
            .zip(&recorded)
            .map(|(fresh, old)| old.and(fresh))
            .collect();
        // an empty root set passes vacuously
        let max = if residuals.is_empty() {
            Some(0.0)
        } else {
            json::max_norm(&residuals)
        };
        if max.is_some_and(|m| !(m < threshold)) {
            pass = false;
        }
        seen = true;
        overall = match (overall, max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        out.push(json!({
            "index": k,
            "lambdas": cx_list(&lambdas),
            "residuals": opt_cx_list(&residuals),
            "flags": sol.get("flags").cloned().unwrap_or(json!([])),
            "max_residual": max.map_or(json!(json::INDETERMINATE), num),
        }));
    }
    Ok((
        json!({
            "schema": SCHEMA,
            "model": model.name(),
            "threshold": num(threshold),
            "pass": pass,
            "max_residual": if seen { overall.map_or(json!(json::INDETERMINATE), num) } else { num(0.0) },
            "solutions": out,
        }),
        pass,
    ))
}
