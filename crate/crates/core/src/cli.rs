//! Command-line front end.
//!
//! Exit codes: 0 pass, 1 acceptance failure, 2 usage, 3 domain, 4 defect
//! ceiling.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;

use crate::error::PolylogError;
use crate::inversion::{default_grid, linspace_step, residual_grid, tensor_grid};
use crate::report::{sample_records, to_csv, to_json, Record};
use crate::rh::{
    default_test_points, reconstruct, ContourSpec, JumpMode, QuadratureRule, ReconstructionConfig,
    DEFAULT_DEFECT_CEILING, DEFAULT_PROBE,
};
use crate::specialfn::{
    li1, li21n, li_series_with_error, li_with, zeta_value, SeriesConfig, LI21N_TOL, LI_PATH_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_CEILING: i32 = 4;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "POLYLOG_RH_THREADS";

const CSV_HELP: &str = "\
CSV columns by command:
  eval              function,k,z_re,z_im,value_re,value_im,est_error
  zeta              k,value
  verify-inversion  k,z_re,z_im,lhs_re,lhs_im,residual_re,residual_im,residual_abs,error
  reconstruct       k,mode,c_plus_re,c_plus_im,c_minus_re,c_minus_im,liouville_defect,
                    max_error_plus,max_error_minus,quadrature_error_estimate,tail_estimate,line_points
Summaries follow as '# key=value ...' lines. JSON output is an array of flat
objects tagged by a 'record' field and also carries per-point 'sample' rows
for reconstruct.

Exit codes: 0 pass, 1 acceptance failure, 2 usage, 3 domain, 4 defect ceiling.
Set POLYLOG_RH_THREADS to cap parallelism.";

#[derive(Debug, Parser)]
#[command(name = "polylog-rh", version, about = "Polylogarithms, zeta values and the recursive Riemann-Hilbert reconstruction", after_help = CSV_HELP)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate li, li21n or li1 at points "x+yi".
    Eval(EvalArgs),
    /// Zeta values for k = 2..=k_max, or a single k.
    Zeta(ZetaArgs),
    /// Residuals of the inversion relation over a strip grid.
    VerifyInversion(InversionArgs),
    /// Rebuild Li_2..Li_kmax from zeta values and compare with the references.
    Reconstruct(ReconstructArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Function {
    Li,
    Li21n,
    Li1,
}

impl Function {
    fn name(self) -> &'static str {
        match self {
            Function::Li => "li",
            Function::Li21n => "li21n",
            Function::Li1 => "li1",
        }
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long = "fn", value_enum, default_value_t = Function::Li)]
    function: Function,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Complex point, repeatable.
    #[arg(long, required = true, allow_hyphen_values = true, value_parser = parse_complex)]
    z: Vec<Complex<f64>>,
}

#[derive(Debug, Args)]
struct ZetaArgs {
    #[arg(long, conflicts_with = "k_max")]
    k: Option<usize>,
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    #[arg(long, default_value_t = 6)]
    tail_terms: usize,
}

#[derive(Debug, Args)]
struct InversionArgs {
    #[arg(long, default_value_t = 6)]
    k_max: usize,
    /// "re_min:re_max:re_step,im_min:im_max:im_step"; defaults to the
    /// 45-point grid {0.1,0.3,...,0.9} x {-2,-1.5,...,2}i.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    PureRecursive,
    OracleJump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Rule {
    Trapezoid,
    Gauss,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long, default_value_t = 5)]
    k_max: usize,
    #[arg(long, default_value_t = 0.1)]
    a: f64,
    #[arg(long, default_value_t = 0.9)]
    b: f64,
    #[arg(long, default_value_t = 30.0)]
    u_max: f64,
    /// Panels per contour line; a multiple of 4.
    #[arg(long, default_value_t = 2048)]
    nodes: usize,
    #[arg(long, value_enum, default_value_t = Rule::Trapezoid)]
    rule: Rule,
    #[arg(long, value_enum, default_value_t = Mode::PureRecursive)]
    mode: Mode,
    /// Test point, repeatable; defaults to {0.15,0.5,0.85} x {-1,0,1}i.
    #[arg(long = "point", allow_hyphen_values = true, value_parser = parse_complex)]
    points: Vec<Complex<f64>>,
    #[arg(long, default_value_t = DEFAULT_PROBE)]
    probe: f64,
    /// Largest acceptable sample error at any level.
    #[arg(long, default_value_t = 1e-5)]
    threshold: f64,
    /// Abort when a level's Liouville defect exceeds this.
    #[arg(long, default_value_t = DEFAULT_DEFECT_CEILING)]
    ceiling: f64,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

/// Parses `x`, `x+yi`, `x-yi`, `yi` with optional whitespace; decimals only.
pub fn parse_complex(text: &str) -> Result<Complex<f64>, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot parse complex number {text:?}; expected a form like 0.5-1.25i");
    let num = |t: &str| -> Result<f64, String> {
        let ok = !t.is_empty()
            && t.chars().all(|c| c.is_ascii_digit() || "+-.eE".contains(c))
            && t.chars().any(|c| c.is_ascii_digit());
        match t.parse::<f64>() {
            Ok(v) if ok && v.is_finite() => Ok(v),
            _ => Err(bad()),
        }
    };
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex::new(num(&s)?, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
        .map(|(i, _)| i)
        .last();
    let imag = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(t),
    };
    match split {
        Some(i) => Ok(Complex::new(num(&body[..i])?, imag(&body[i..])?)),
        None => Ok(Complex::new(0.0, imag(body)?)),
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("range {text:?} must be min:max:step"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("bad number {p:?} in range {text:?}"))
        })
        .collect::<Result<_, _>>()?;
    linspace_step(v[0], v[1], v[2]).map_err(|e| e.to_string())
}

/// Parses `re_min:re_max:re_step,im_min:im_max:im_step` into a tensor grid.
pub fn parse_grid(text: &str) -> Result<Vec<Complex<f64>>, String> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| format!("grid {text:?} must be re_min:re_max:re_step,im_min:im_max:im_step"))?;
    Ok(tensor_grid(&parse_range(re)?, &parse_range(im)?))
}

fn exit_code(e: &PolylogError) -> i32 {
    match e {
        PolylogError::Domain(_) => EXIT_DOMAIN,
        PolylogError::Precondition(_) | PolylogError::Argument(_) | PolylogError::Contour(_) => {
            EXIT_USAGE
        }
        PolylogError::Ceiling { .. } => EXIT_CEILING,
        PolylogError::Budget(_) | PolylogError::Accuracy(_) | PolylogError::Path(_) => EXIT_FAIL,
    }
}

fn thread_count() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
    }
}

/// Runs the CLI on `args` (including the program name) without touching the
/// process's standard streams, except for writing `--out` files.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome::usage(text)
            };
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(msg) => return Outcome::usage(msg),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return Outcome::usage(format!("cannot start worker threads: {e}")),
    };
    let (code, records, stderr) = pool.install(|| dispatch(&cli.command));
    let body = match cli.format {
        Format::Json => to_json(&records),
        Format::Csv => to_csv(&records),
    };
    match &cli.out {
        Some(path) => match std::fs::write(path, &body) {
            Ok(()) => Outcome { code, stdout: String::new(), stderr },
            Err(e) => Outcome::usage(format!("cannot write {}: {e}", path.display())),
        },
        None => Outcome { code, stdout: body, stderr },
    }
}

type Dispatch = (i32, Vec<Record>, String);

fn dispatch(cmd: &Command) -> Dispatch {
    match cmd {
        Command::Eval(a) => cmd_eval(a),
        Command::Zeta(a) => cmd_zeta(a),
        Command::VerifyInversion(a) => cmd_verify_inversion(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
    }
}

fn failed(e: &PolylogError, records: Vec<Record>) -> Dispatch {
    (exit_code(e), records, format!("error: {e}\n"))
}

fn cmd_eval(a: &EvalArgs) -> Dispatch {
    let cfg = SeriesConfig::<f64>::default();
    let mut records = Vec::new();
    for &z in &a.z {
        let evaluated = match a.function {
            Function::Li1 => li1(z).map(|v| (v, f64::EPSILON * v.norm().max(1.0))),
            Function::Li => {
                if a.k >= 1 && z.norm() <= cfg.radius_switch {
                    li_series_with_error(a.k, z, &cfg)
                } else {
                    li_with(a.k, z, &cfg).map(|v| (v, LI_PATH_TOL))
                }
            }
            Function::Li21n => li21n(a.k, z).map(|v| (v, LI21N_TOL)),
        };
        match evaluated {
            Ok((v, err)) => records.push(Record::Eval {
                function: a.function.name().to_string(),
                k: if a.function == Function::Li1 { 1 } else { a.k },
                z_re: z.re,
                z_im: z.im,
                value_re: v.re,
                value_im: v.im,
                est_error: err,
            }),
            Err(e) => return failed(&e, records),
        }
    }
    (EXIT_OK, records, String::new())
}

fn cmd_zeta(a: &ZetaArgs) -> Dispatch {
    let ks: Vec<usize> = match a.k {
        Some(k) => vec![k],
        None => (2..=a.k_max).collect(),
    };
    let mut records = Vec::new();
    for k in ks {
        match zeta_value::<f64>(k, a.tail_terms) {
            Ok(value) => records.push(Record::Zeta { k, value }),
            Err(e) => return failed(&e, records),
        }
    }
    (EXIT_OK, records, String::new())
}

fn cmd_verify_inversion(a: &InversionArgs) -> Dispatch {
    if a.k_max < 2 {
        return (EXIT_USAGE, Vec::new(), "error: k_max must be at least 2\n".into());
    }
    let grid = match &a.grid {
        None => default_grid(),
        Some(spec) => match parse_grid(spec) {
            Ok(g) => g,
            Err(msg) => return (EXIT_USAGE, Vec::new(), format!("error: {msg}\n")),
        },
    };
    let outcomes = residual_grid(a.k_max, &grid);
    let mut records: Vec<Record> = outcomes.iter().map(Record::from).collect();
    let failed_points = outcomes.iter().filter(|o| o.result.is_err()).count();
    let max_residual = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .map(|r| r.residual.norm())
        .fold(0.0, f64::max);
    let pass = failed_points == 0 && max_residual <= a.threshold;
    records.push(Record::InversionSummary {
        points: outcomes.len(),
        failed: failed_points,
        max_residual,
        threshold: a.threshold,
        pass,
    });
    let (code, stderr) = if failed_points > 0 {
        let first = outcomes.iter().find_map(|o| o.result.as_ref().err()).expect("counted");
        (EXIT_DOMAIN, format!("error: {failed_points} grid points failed; first: {first}\n"))
    } else if !pass {
        (
            EXIT_FAIL,
            format!("max residual {max_residual:e} exceeds threshold {:e}\n", a.threshold),
        )
    } else {
        (EXIT_OK, String::new())
    };
    (code, records, stderr)
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Dispatch {
    if a.k_max < 2 {
        return (EXIT_USAGE, Vec::new(), "error: k_max must be at least 2\n".into());
    }
    if !(a.a < a.b) {
        return (
            EXIT_USAGE,
            Vec::new(),
            format!("error: contour abscissas must satisfy a < b (a = {}, b = {})\n", a.a, a.b),
        );
    }
    let rule = match a.rule {
        Rule::Trapezoid => QuadratureRule::TrapezoidMapped,
        Rule::Gauss => QuadratureRule::GaussLegendrePanels,
    };
    let line = |abscissa: f64| ContourSpec { abscissa, u_max: a.u_max, nodes: a.nodes, rule };
    let mut cfg = ReconstructionConfig::<f64>::new(a.k_max);
    cfg.left = line(a.a);
    cfg.right = line(a.b);
    cfg.mode = match a.mode {
        Mode::PureRecursive => JumpMode::PureRecursive,
        Mode::OracleJump => JumpMode::OracleJump,
    };
    cfg.test_points = if a.points.is_empty() { default_test_points() } else { a.points.clone() };
    cfg.probe = Complex::new(a.probe, 0.0);
    cfg.defect_ceiling = a.ceiling;

    let result = match reconstruct(&cfg) {
        Ok(r) => r,
        Err(e) => return failed(&e, Vec::new()),
    };
    let mut records = Vec::new();
    for r in &result.reports {
        records.push(Record::from(r));
        records.extend(sample_records(r));
    }
    let max_error = result
        .reports
        .iter()
        .map(|r| r.max_error_plus().max(r.max_error_minus()))
        .fold(0.0, f64::max);
    let pass = result.aborted.is_none() && max_error <= a.threshold;
    records.push(Record::ReconstructSummary {
        levels: result.reports.len(),
        max_error,
        threshold: a.threshold,
        pass,
        aborted: result.aborted.as_ref().map(|e| e.to_string()),
    });
    match &result.aborted {
        Some(e) => {
            let (code, _, stderr) = failed(e, Vec::new());
            (code, records, stderr)
        }
        None if pass => (EXIT_OK, records, String::new()),
        None => (
            EXIT_FAIL,
            records,
            format!("max sample error {max_error:e} exceeds threshold {:e}\n", a.threshold),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = |re, im| Complex::new(re, im);
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), c(0.5, 0.25));
        assert_eq!(parse_complex(" -1 - 2i ").unwrap(), c(-1.0, -2.0));
        assert_eq!(parse_complex("1e-3-2.5e+1i").unwrap(), c(1e-3, -25.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        for bad in ["", "i5", "nan", "inf", "1+2j", "0x10", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.5:0.5:0.1,0:0:1").unwrap(), vec![Complex::new(0.5, 0.0)]);
        assert_eq!(parse_grid("0.1:0.9:0.2,-2:2:0.5").unwrap().len(), 45);
        assert!(parse_grid("bad").is_err());
        assert!(parse_grid("0:1:0,0:1:1").is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&PolylogError::Domain("x".into())), EXIT_DOMAIN);
        assert_eq!(exit_code(&PolylogError::Contour("x".into())), EXIT_USAGE);
        let ceiling = PolylogError::Ceiling { k: 3, defect: 1.0, ceiling: 0.5 };
        assert_eq!(exit_code(&ceiling), EXIT_CEILING);
    }

    #[test]
    fn eval_command() {
        let out = run(["polylog-rh", "eval", "--fn", "li", "--k", "2", "--z", "0.5"]);
        assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
        assert!(out.stdout.contains("\"value_re\":5.82240526465012"), "{}", out.stdout);
        let out = run(["polylog-rh", "eval", "--fn", "li", "--k", "2", "--z", "2"]);
        assert_eq!(out.code, EXIT_DOMAIN);
        assert!(out.stderr.contains("on cut of D"), "{}", out.stderr);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["polylog-rh", "eval", "--z", "1+"]).code, EXIT_USAGE);
        assert_eq!(run(["polylog-rh", "verify-inversion", "--grid", "bad"]).code, EXIT_USAGE);
        let out = run(["polylog-rh", "reconstruct", "--a", "0.6", "--b", "0.4"]);
        assert_eq!(out.code, EXIT_USAGE);
        assert!(out.stderr.contains("contour abscissas must satisfy a < b"));
        assert_eq!(run(["polylog-rh", "--help"]).code, EXIT_OK);
    }
}
