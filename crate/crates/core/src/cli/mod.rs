//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a solver or verification fails, 2 for
//! invalid input.

mod config;
mod json;
mod solve;
mod tables;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::Value;

pub use config::{parse_complex, parse_list, Format, Model, RunConfig};
pub use tables::{arcsine_cdf, histogram, ks_arcsine};

use crate::error::Error;

#[derive(Debug)]
pub(crate) enum Failure {
    Input(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_)
            | Error::Degree(_)
            | Error::NotInImage { .. }
            | Error::NearRootOfUnity { .. }
            | Error::CoincidentPoints(..)
            | Error::GammaPole(_)
            | Error::ZeroLeading
            | Error::ConstantPolynomial => Failure::Input(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

/// A comma-separated list of `re` or `re:im` values.
#[derive(Clone, Debug)]
pub struct List(pub Vec<C64>);

fn list(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

/// A comma-separated list of real values.
#[derive(Clone, Debug)]
pub struct Reals(pub Vec<f64>);

fn reals(s: &str) -> Result<Reals, String> {
    config::parse_reals(s).map(Reals)
}

#[derive(Parser, Debug)]
#[command(
    name = "bethe-qsl",
    version,
    about = "Bethe roots from polynomial eigenfunctions of Askey-Wilson and Wilson operators"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Acceptance threshold for the scaled defect.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[arg(long, global = true)]
    pub starts: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for polynomial eigenfunctions and their Bethe roots.
    Solve(ProblemArgs),
    /// Recompute Bethe residuals for the roots in a solve report.
    Verify(VerifyArgs),
    /// Zeros of a high-degree Askey-Wilson polynomial against the arcsine law.
    Distribution(DistributionArgs),
    /// Tabulate the orthogonality weight.
    Weights(WeightsArgs),
    /// Indicial exponents at a singular point.
    Indicial(IndicialArgs),
}

#[derive(Args, Debug)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Imaginary part of η (η = i·value).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_imag: Option<f64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub eta: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Option<C64>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub spins: Option<List>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub a: Option<List>,
    /// Chain length for the XXX ground-state reduction.
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub spin: Option<f64>,
    /// Coefficients of Π, constant term first.
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub pi: Option<List>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub phi: Option<List>,
    /// Degree of the eigenfunction (number of Bethe roots).
    #[arg(long)]
    pub n: Option<usize>,
    /// Read the problem from a JSON config instead of flags.
    #[arg(long, conflicts_with_all = ["model", "eta_imag", "eta", "q", "spins", "a", "l", "spin", "pi", "phi", "n"])]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// A JSON report written by `solve`.
    pub report: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub threshold: f64,
    /// Check only this solution (zero-based).
    #[arg(long)]
    pub solution: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DistributionArgs {
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub eta_imag: f64,
    #[arg(long, value_parser = list, default_value = "-0.5,-0.5,-0.7,-0.9", allow_hyphen_values = true)]
    pub spins: List,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
}

#[derive(Args, Debug)]
pub struct WeightsArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    #[arg(long, allow_hyphen_values = true)]
    pub eta_imag: Option<f64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Option<C64>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub a: Option<List>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub spins: Option<List>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub spin: f64,
    /// Evaluation points in x (xxz).
    #[arg(long, value_parser = reals, allow_hyphen_values = true)]
    pub x: Option<Reals>,
    /// Evaluation points in y (xxx).
    #[arg(long, value_parser = reals, allow_hyphen_values = true)]
    pub y: Option<Reals>,
}

#[derive(Args, Debug)]
pub struct IndicialArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub eta_imag: Option<f64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Option<C64>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub a: Option<List>,
    #[arg(long, value_parser = list, allow_hyphen_values = true)]
    pub spins: Option<List>,
    /// Index of the expansion point, counted from 1.
    #[arg(long, default_value_t = 1)]
    pub pivot: usize,
}

fn eta_from(imag: Option<f64>, full: Option<C64>) -> Result<Option<C64>, Failure> {
    match (imag, full) {
        (Some(_), Some(_)) => Err(Failure::Input("give one of --eta and --eta-imag".into())),
        (Some(v), None) => Ok(Some(C64::new(0.0, v))),
        (None, e) => Ok(e),
    }
}

fn unlist(v: Option<List>) -> Option<Vec<C64>> {
    v.map(|l| l.0)
}

/// The `solve` configuration described by the flags, after global overrides.
pub fn config_from(args: ProblemArgs, global: &Global) -> Result<RunConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        None => {
            let model = args.model.ok_or("missing --model")?;
            let mut cfg = RunConfig::empty(model);
            cfg.eta = eta_from(args.eta_imag, args.eta).map_err(|f| match f {
                Failure::Input(m) | Failure::Solver(m) => m,
            })?;
            cfg.q = args.q;
            cfg.spins = unlist(args.spins);
            cfg.a = unlist(args.a);
            cfg.l = args.l;
            cfg.spin = args.spin;
            cfg.pi = unlist(args.pi);
            cfg.phi = unlist(args.phi);
            cfg.n = args.n;
            cfg
        }
    };
    if let Some(t) = global.tolerance {
        cfg.solver.tolerance = t;
    }
    if let Some(s) = global.starts {
        cfg.solver.starts = s;
    }
    if let Some(s) = global.seed {
        cfg.solver.seed = s;
    }
    if let Some(m) = global.max_iter {
        cfg.solver.max_iter = m;
    }
    cfg.format = global.format;
    Ok(cfg)
}

/// Parses a `solve` command line (program name first) into its config.
pub fn config_from_args<I, T>(args: I) -> Result<RunConfig, String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
    match cli.command {
        Command::Solve(p) => config_from(p, &cli.global),
        _ => Err("not a solve command".into()),
    }
}

pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let format = cli.global.format;
    let out = cli.global.out.clone();
    match dispatch(cli) {
        Ok((value, ok, what)) => {
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&value).expect("report serialises") + "\n",
                Format::Csv => csv_of(&value, what),
            };
            if let Err(e) = emit(&text, out.as_ref()) {
                eprintln!("error: {e}");
                return 1;
            }
            if ok {
                0
            } else {
                eprintln!("error: {}", failure_note(what));
                1
            }
        }
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: invalid input: {m}"),
                Failure::Solver(m) => eprintln!("error: solver failure: {m}"),
            }
            f.code()
        }
    }
}

#[derive(Clone, Copy)]
enum Table {
    Roots,
    Distribution,
    Weights,
    Indicial,
}

fn failure_note(t: Table) -> &'static str {
    match t {
        Table::Roots => "no solution met the tolerance (or a residual exceeded the threshold)",
        _ => "command failed",
    }
}

fn dispatch(cli: Cli) -> Result<(Value, bool, Table), Failure> {
    let global = cli.global;
    match cli.command {
        Command::Solve(args) => {
            let cfg = config_from(args, &global).map_err(Failure::Input)?;
            let (v, ok) = solve::solve(&cfg)?;
            Ok((v, ok, Table::Roots))
        }
        Command::Verify(args) => {
            let text = std::fs::read_to_string(&args.report)
                .map_err(|e| Failure::Input(format!("{}: {e}", args.report.display())))?;
            let (v, ok) = solve::verify(&text, args.threshold, args.solution)?;
            Ok((v, ok, Table::Roots))
        }
        Command::Distribution(args) => {
            let v = tables::distribution(C64::new(0.0, args.eta_imag), &args.spins.0, args.n, args.bins)?;
            Ok((v, true, Table::Distribution))
        }
        Command::Weights(args) => {
            let points = match args.model {
                Model::Xxx => args.y,
                _ => args.x,
            }
            .map(|r| r.0);
            let req = tables::WeightsRequest {
                model: args.model,
                eta: eta_from(args.eta_imag, None)?,
                q: args.q,
                a: unlist(args.a),
                spins: unlist(args.spins),
                l: args.l,
                spin: args.spin,
                points,
            };
            Ok((tables::weights(&req)?, true, Table::Weights))
        }
        Command::Indicial(args) => {
            let params = solve::xxz_params(
                eta_from(args.eta_imag, None)?,
                args.q,
                &unlist(args.spins),
                &unlist(args.a),
            )?;
            Ok((tables::indicial(&params, args.pivot)?, true, Table::Indicial))
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn parts(v: Option<&Value>) -> [String; 2] {
    match v {
        Some(Value::Array(a)) if a.len() == 2 => [cell(&a[0]), cell(&a[1])],
        Some(other) => [cell(other), cell(other)],
        None => [String::new(), String::new()],
    }
}

/// Root rows carry the solution index in front of the documented columns.
fn csv_of(value: &Value, what: Table) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let empty = Vec::new();
    let arr = |v: Option<&Value>| v.and_then(Value::as_array).unwrap_or(&empty).clone();
    let mut write = |row: Vec<String>| w.write_record(&row).expect("in-memory csv");
    match what {
        Table::Roots => {
            write(
                [
                    "solution",
                    "index",
                    "re_lambda",
                    "im_lambda",
                    "re_residual",
                    "im_residual",
                    "flag",
                ]
                .map(String::from)
                .to_vec(),
            );
            for (s, sol) in arr(value.get("solutions")).iter().enumerate() {
                let sid = sol.get("index").map_or(s.to_string(), cell);
                let flags: Vec<String> = arr(sol.get("flags")).iter().map(cell).collect();
                let res = arr(sol.get("residuals"));
                for (k, l) in arr(sol.get("lambdas")).iter().enumerate() {
                    let r = res.get(k);
                    let flag = if r.and_then(Value::as_str).is_some() {
                        json::INDETERMINATE.to_string()
                    } else {
                        flags.join(";")
                    };
                    let [lr, li] = parts(Some(l));
                    let [rr, ri] = parts(r);
                    write(vec![sid.clone(), k.to_string(), lr, li, rr, ri, flag]);
                }
            }
        }
        Table::Distribution => {
            write(
                [
                    "index",
                    "re_lambda",
                    "im_lambda",
                    "re_residual",
                    "im_residual",
                    "flag",
                    "x",
                ]
                .map(String::from)
                .to_vec(),
            );
            let res = arr(value.get("residuals"));
            let xs = arr(value.get("x"));
            for (k, l) in arr(value.get("lambdas")).iter().enumerate() {
                let r = res.get(k);
                let flag = if r.and_then(Value::as_str).is_some() {
                    json::INDETERMINATE
                } else {
                    ""
                };
                let [lr, li] = parts(Some(l));
                let [rr, ri] = parts(r);
                write(vec![
                    k.to_string(),
                    lr,
                    li,
                    rr,
                    ri,
                    flag.into(),
                    parts(xs.get(k))[0].clone(),
                ]);
            }
            write(["bin_lo", "bin_hi", "count"].map(String::from).to_vec());
            let h = value.get("histogram");
            let edges = arr(h.and_then(|h| h.get("edges")));
            for (k, c) in arr(h.and_then(|h| h.get("counts"))).iter().enumerate() {
                write(vec![cell(&edges[k]), cell(&edges[k + 1]), cell(c)]);
            }
            write(vec![
                "ks_distance".into(),
                value.get("ks_distance").map_or(String::new(), cell),
            ]);
        }
        Table::Weights => {
            let rows = arr(value.get("points"));
            if value.get("model").and_then(Value::as_str) == Some("xxx") {
                write(["y", "x", "w", "closed_form"].map(String::from).to_vec());
                for r in &rows {
                    write(vec![
                        r.get("y").map_or(String::new(), cell),
                        r.get("x").map_or(String::new(), cell),
                        r.get("w").map_or(String::new(), cell),
                        r.get("closed_form").map_or(String::new(), cell),
                    ]);
                }
            } else {
                write(["x", "re_w", "im_w"].map(String::from).to_vec());
                for r in &rows {
                    let [wr, wi] = parts(r.get("w"));
                    write(vec![r.get("x").map_or(String::new(), cell), wr, wi]);
                }
            }
        }
        Table::Indicial => {
            write(
                ["index", "re_exponent", "im_exponent", "re_residual", "im_residual"]
                    .map(String::from)
                    .to_vec(),
            );
            let res = arr(value.get("residuals"));
            for (k, e) in arr(value.get("exponents")).iter().enumerate() {
                let [er, ei] = parts(Some(e));
                let [rr, ri] = parts(res.get(k));
                write(vec![k.to_string(), er, ei, rr, ri]);
            }
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}
