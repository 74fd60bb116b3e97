//! Command-line front end.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sectorial_core::calculus::{frac_power, ContourSpec};
use sectorial_core::dtn::{dtn_limit_with, DtNResult};
use sectorial_core::extension::{
    extend_bessel, extend_integral, extend_subordination, geometric_schedule, profile_with, two_param_solution, Method,
    DEFAULT_POINTS_PER_DECADE,
};
use sectorial_core::kernels::{c_alpha, FracOrder};
use sectorial_core::operators::OperatorHandle;
use sectorial_core::{vector, C64};

use crate::error::CliError;
use crate::exec::Threaded;
use crate::io::Cplx;
use crate::opspec::{self, LoadOptions};
use crate::report::{self, cx_vec, Cx};
use crate::selftest;

#[derive(Debug, Parser)]
#[command(name = "sectorial", version, about = "Fractional powers of sectorial operators through the harmonic extension")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute A^α x by one or more methods.
    Fracpow(FracpowArgs),
    /// Tabulate the extension profile t ↦ U(t)x.
    Extend(ExtendArgs),
    /// Extrapolate the Dirichlet-to-Neumann limit and compare with c_α A^α x.
    Dtn(DtnArgs),
    /// Run the kernel identity suite.
    Selftest(SelftestArgs),
    /// Compare the extension routes pairwise.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    /// Builtin (laplacian1d:n, laplacian1d-matfree:n, identity:n, diag:a,b,…) or matrix file.
    #[arg(long = "op")]
    pub op: String,
    /// Sector half-angle; required for non-Hermitian matrix files.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Neither read nor write the spectral sidecar of a matrix file.
    #[arg(long)]
    pub no_cache: bool,
    /// Fractional order in (0, 1).
    #[arg(long)]
    pub alpha: f64,
    /// Vector x as a CSV file (one row or one column).
    #[arg(long, conflicts_with = "basis")]
    pub x: Option<PathBuf>,
    /// Use the canonical basis vector e_k (0-based) as x; all ones otherwise.
    #[arg(long)]
    pub basis: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ContourArgs {
    /// Half-angle of the contour rays.
    #[arg(long)]
    pub phi: Option<f64>,
    /// Fixed range of log|λ| on each ray, as `lo,hi`.
    #[arg(long, value_delimiter = ',', num_args = 2, requires = "nodes")]
    pub log_range: Option<Vec<f64>>,
    /// Nodes per ray for a fixed range.
    #[arg(long, requires = "log_range")]
    pub nodes: Option<usize>,
    /// Refine the quadrature step until successive results agree to this tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl ContourArgs {
    fn spec(&self) -> ContourSpec {
        let mut s = ContourSpec { phi: self.phi, nodes: self.nodes, ..ContourSpec::default() };
        if let Some(r) = &self.log_range {
            s.log_range = Some((r[0], r[1]));
        }
        match self.tol {
            Some(t) => s.adaptive(t),
            None => s,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct FracpowArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Comma-separated methods: contour, spectral.
    #[arg(long, value_delimiter = ',', default_value = "contour")]
    pub method: Vec<String>,
    #[command(flatten)]
    pub contour: ContourArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Route: bessel, integral, subordination or series.
    #[arg(long, default_value = "bessel")]
    pub method: String,
    /// Explicit increasing schedule `t1,t2,…`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_min", "t_max", "points_per_decade"])]
    pub t: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1e-3)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = DEFAULT_POINTS_PER_DECADE)]
    pub points_per_decade: usize,
    /// Include every vector in JSON output.
    #[arg(long)]
    pub full_vectors: bool,
    #[command(flatten)]
    pub contour: ContourArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DtnArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Reference for c_α A^α x: contour or spectral.
    #[arg(long, default_value = "contour")]
    pub method: String,
    /// Explicit decreasing schedule `t1,t2,…`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["k_min", "k_max"])]
    pub t: Option<Vec<f64>>,
    /// Schedule t = 2^-k for k = k_min..=k_max.
    #[arg(long, default_value_t = 4)]
    pub k_min: i32,
    #[arg(long, default_value_t = 20)]
    pub k_max: i32,
    /// Include the Neumann samples in JSON output.
    #[arg(long)]
    pub full_vectors: bool,
    #[command(flatten)]
    pub contour: ContourArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Orders to sweep; 0.1, 0.2, …, 0.9 by default.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Inflate the errors of one identity to exercise the failure path.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub operator: OperatorArgs,
    /// Routes to compare pairwise.
    #[arg(long, value_delimiter = ',', default_value = "bessel,integral,subordination")]
    pub method: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,1")]
    pub t: Vec<f64>,
    #[command(flatten)]
    pub contour: ContourArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

struct Setup {
    op: OperatorHandle,
    alpha: FracOrder,
    x: Vec<C64>,
}

fn setup(args: &OperatorArgs) -> Result<Setup, CliError> {
    let alpha = FracOrder::real(args.alpha)?;
    let loaded = opspec::load(&args.op, LoadOptions { omega: args.omega, cache: !args.no_cache })?;
    let x = opspec::load_vector(args.x.as_deref(), args.basis, loaded.op.dim())?;
    Ok(Setup { op: loaded.op, alpha, x })
}

fn emit(out: &Option<PathBuf>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Output(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Output(e.to_string())),
    }
}

fn threads() -> Result<Threaded, CliError> {
    Threaded::from_env().map_err(CliError::Parse)
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Fracpow(a) => fracpow(a, stdout),
        Command::Extend(a) => extend(a, stdout),
        Command::Dtn(a) => dtn(a, stdout),
        Command::Selftest(a) => selftest_cmd(a, stdout),
        Command::Compare(a) => compare(a, stdout),
    }
}

#[derive(Serialize)]
struct MethodResult<'a> {
    method: &'a str,
    values: Vec<Cx>,
}

#[derive(Serialize)]
struct CrossError<'a> {
    method: &'a str,
    reference: &'a str,
    rel_error: f64,
}

#[derive(Serialize)]
struct FracpowJson<'a> {
    alpha: f64,
    n: usize,
    x: Vec<Cx>,
    results: Vec<MethodResult<'a>>,
    cross_errors: Vec<CrossError<'a>>,
}

fn fracpow(a: FracpowArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let s = setup(&a.operator)?;
    let contour = a.contour.spec();
    let al = s.alpha.value();
    let mut results = Vec::new();
    for m in &a.method {
        let v = match m.as_str() {
            "contour" => frac_power(&s.op, s.alpha, &s.x, &contour)?,
            "spectral" => s.op.spectral_apply(|l| Ok(l.powc(al)), &s.x)?,
            other => return Err(CliError::Precondition(format!("method '{other}' does not compute fractional powers (use contour, spectral)"))),
        };
        results.push((m.as_str(), v));
    }
    let cross: Vec<CrossError> = results
        .iter()
        .skip(1)
        .map(|(m, v)| CrossError { method: m, reference: results[0].0, rel_error: vector::rel_dist(v, &results[0].1) })
        .collect();
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("index");
            for (m, _) in &results {
                t.push(',');
                t.push_str(m);
            }
            let with_error = results.len() > 1;
            if with_error {
                t.push_str(",error");
            }
            t.push('\n');
            let scale = vector::norm(&results[0].1);
            for i in 0..s.x.len() {
                t.push_str(&i.to_string());
                for (_, v) in &results {
                    t.push_str(&format!(",{}", Cplx(v[i])));
                }
                if with_error {
                    let e = results[1..].iter().map(|(_, v)| (v[i] - results[0].1[i]).norm()).fold(0.0, f64::max);
                    t.push_str(&format!(",{:e}", if scale > 0.0 { e / scale } else { e }));
                }
                t.push('\n');
            }
            t
        }
        Format::Json => report::to_json(&FracpowJson {
            alpha: s.alpha.re(),
            n: s.x.len(),
            x: cx_vec(&s.x),
            results: results.iter().map(|(m, v)| MethodResult { method: m, values: cx_vec(v) }).collect(),
            cross_errors: cross,
        }),
    };
    emit(&a.output.out, &text, stdout)
}

fn parse_method(tag: &str) -> Result<Method, CliError> {
    Method::from_tag(tag)
        .ok_or_else(|| CliError::Precondition(format!("unknown extension method '{tag}' (use bessel, integral, subordination, series)")))
}

fn extend(a: ExtendArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let method = parse_method(&a.method)?;
    let s = setup(&a.operator)?;
    let schedule = match &a.t {
        Some(t) => t.clone(),
        None => geometric_schedule(a.t_min, a.t_max, a.points_per_decade)?,
    };
    let p = profile_with(&threads()?, &s.op, s.alpha, &s.x, &schedule, method, &a.contour.spec())?;
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => report::profile_csv(&p),
        Format::Json => report::profile_json(&p, a.full_vectors),
    };
    emit(&a.output.out, &text, stdout)
}

fn dtn(a: DtnArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !matches!(a.method.as_str(), "contour" | "spectral") {
        return Err(CliError::Precondition(format!("dtn reference method '{}' must be contour or spectral", a.method)));
    }
    let s = setup(&a.operator)?;
    let schedule = match &a.t {
        Some(t) => t.clone(),
        None => (a.k_min..=a.k_max).map(|k| 0.5f64.powi(k)).collect(),
    };
    let mut r: DtNResult = dtn_limit_with(&threads()?, &s.op, s.alpha, &s.x, &schedule, &a.contour.spec())?;
    if a.method == "spectral" {
        let al = s.alpha.value();
        let p = s.op.spectral_apply(|l| Ok(l.powc(al)), &s.x)?;
        r.reference = vector::scale(c_alpha(s.alpha), &p);
        r.rel_error = vector::rel_dist(&r.extrapolated_limit, &r.reference);
    }
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Csv => report::dtn_csv_line(&r, &a.method),
        Format::Json => report::dtn_json(&r, &a.method, a.full_vectors),
    };
    emit(&a.output.out, &text, stdout)
}

fn selftest_cmd(a: SelftestArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if let Some(f) = &a.inject_fault {
        if !selftest::IDENTITIES.contains(&f.as_str()) {
            return Err(CliError::Parse(format!("unknown identity '{f}' (one of {})", selftest::IDENTITIES.join(", "))));
        }
    }
    let alphas = a.alphas.clone().unwrap_or_else(selftest::default_alphas);
    let checks = selftest::run(&alphas, a.inject_fault.as_deref())?;
    emit(&a.out, &selftest::render(&checks, &alphas), stdout)?;
    let mut failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.identity).collect();
    failed.dedup();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::SelfTest(failed.join(", ")))
    }
}

#[derive(Serialize)]
struct CompareRow<'a> {
    t: f64,
    method_a: &'a str,
    method_b: &'a str,
    rel_diff: f64,
}

fn compare(a: CompareArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let methods: Vec<Method> = a.method.iter().map(|m| parse_method(m)).collect::<Result<_, _>>()?;
    if methods.len() < 2 {
        return Err(CliError::Precondition(String::from("compare needs at least two methods")));
    }
    let s = setup(&a.operator)?;
    let contour = a.contour.spec();
    let series_y = if methods.contains(&Method::Series) {
        Some(vector::scale(-c_alpha(s.alpha), &frac_power(&s.op, s.alpha, &s.x, &contour)?))
    } else {
        None
    };
    let mut rows = Vec::new();
    for &t in &a.t {
        let mut values = Vec::new();
        for &m in &methods {
            let z = C64::new(t, 0.0);
            let v = match m {
                Method::Bessel => extend_bessel(&s.op, s.alpha, &s.x, z, &contour)?,
                Method::Integral => extend_integral(&s.op, s.alpha, &s.x, z)?,
                Method::Subordination => extend_subordination(&s.op, s.alpha, &s.x, t)?,
                Method::Series => two_param_solution(&s.op, s.alpha, &s.x, series_y.as_deref().unwrap_or(&[]), t)?,
            };
            values.push((m, v));
        }
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                rows.push(CompareRow {
                    t,
                    method_a: values[i].0.tag(),
                    method_b: values[j].0.tag(),
                    rel_diff: vector::rel_dist(&values[i].1, &values[j].1),
                });
            }
        }
    }
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut t = String::from("t,method_a,method_b,rel_diff\n");
            for r in &rows {
                t.push_str(&format!("{:e},{},{},{:e}\n", r.t, r.method_a, r.method_b, r.rel_diff));
            }
            t
        }
        Format::Json => report::to_json(&rows),
    };
    emit(&a.output.out, &text, stdout)
}

