//! JSON-in/JSON-out command line for the hornred toolkit.
//!
//! Exit codes: 0 on success, 1 on any operational failure (bad flags,
//! malformed payload, refused computation), 2 when a `check` run completes
//! but finds a catalog entry violating its stated master count.  Every
//! error path writes a single JSON object to stderr; stdout carries the
//! requested output as JSON (default) or plain text.

use std::env;
use std::fs;
use std::io::Read;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use hornred::{
    certify_relation, check_catalog, contour_quadrature, eval_horn, eval_pfq, laurent_expand,
    load_catalog, reduce, residue_sum, shifted_spec, AnySpec, CatalogEntry, EntryReport, Error,
    MBIntegrand, PFQSpec, Rational, ResidueSum,
};

#[derive(Parser)]
#[command(
    name = "hornred",
    version,
    about = "Exact and numeric tools for generalized hypergeometric series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Payload source: a file path, or `-` for stdin.
    #[arg(long, global = true, default_value = "-")]
    input: String,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Series truncation / relation verification order.
    #[arg(long, global = true, default_value_t = 50)]
    order: usize,

    /// Relative tolerance for numeric summation.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,

    /// Maximum number of series terms in numeric summation.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    term_cap: usize,

    /// Catalog file for `check`.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact truncated series coefficients of a pFq or Horn spec.
    Series,
    /// Numeric evaluation of a pFq or Horn spec at a point.
    Eval,
    /// Rewrite a parameter-shifted pFq over the derivative basis of the base.
    Reduce,
    /// Identify the residue series of a one-dimensional contour integrand.
    MbSum,
    /// Numeric contour quadrature of a one-dimensional integrand.
    MbQuad,
    /// Laurent-expand a pFq in eps, regrouped as z-series per eps power.
    EpsExpand,
    /// Verify uniformity and master counts for every catalog entry.
    Check,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// One finished command: pre-serialized JSON, a text rendering, and whether
/// a proposition violation was found (exit 2 instead of 0).
struct CmdOutput {
    json: String,
    text: String,
    violation: bool,
}

impl CmdOutput {
    fn ok<T: Serialize>(value: &T, text: String) -> Result<Self, CliError> {
        Ok(CmdOutput {
            json: serde_json::to_string(value).map_err(CliError::encode)?,
            text,
            violation: false,
        })
    }
}

struct CliError {
    kind: String,
    message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    fn field(name: &str, message: impl std::fmt::Display) -> Self {
        CliError::new("invalid-request", format!("field `{name}`: {message}"))
    }

    fn encode(e: serde_json::Error) -> Self {
        CliError::new("encode", e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Parse(_) => "parse",
            Error::DivisionByZero(_) => "division-by-zero",
            Error::SeriesNotInvertible => "series-not-invertible",
            Error::InvalidSpec(_) => "invalid-spec",
            Error::GammaPole { .. } => "gamma-pole",
            Error::DegenerateStep(_) => "degenerate-step",
            Error::BlockedPath(_) => "blocked-path",
            Error::CertificationFailed { .. } => "certification-failed",
            Error::StageDisagreement(_) => "stage-disagreement",
            Error::NonConvergence { .. } => "non-convergence",
            Error::OutsideDomain(_) => "outside-domain",
            Error::UnsupportedIntegrand(_) => "unsupported-integrand",
            Error::PoleCollision { .. } => "pole-collision",
            Error::NoConvergentSide { .. } => "no-convergent-side",
            Error::NonFiniteSample { .. } => "non-finite-sample",
            Error::Catalog(_) => "catalog",
            Error::Io(_) => "io",
        };
        CliError::new(kind, e.to_string())
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => return fail(&CliError::new("usage", e.render().to_string())),
    };
    let threads = match thread_cap() {
        Ok(n) => n,
        Err(e) => return fail(&e),
    };
    match dispatch(&cli, threads) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", out.json),
                Format::Text => println!("{}", out.text),
            }
            if out.violation {
                2
            } else {
                0
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    let body = ErrorOut {
        error: ErrorBody {
            kind: &e.kind,
            message: &e.message,
        },
    };
    // A hand-rolled fallback keeps even serialization failures machine-readable.
    let rendered = serde_json::to_string(&body)
        .unwrap_or_else(|_| r#"{"error":{"kind":"encode","message":"unrepresentable"}}"#.into());
    eprintln!("{rendered}");
    1
}

/// HORNRED_THREADS caps how many worker threads `check` may use; unset
/// means sequential.
fn thread_cap() -> Result<usize, CliError> {
    match env::var("HORNRED_THREADS") {
        Err(env::VarError::NotPresent) => Ok(1),
        Err(e) => Err(CliError::new("env", format!("HORNRED_THREADS: {e}"))),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::new(
                "env",
                format!("HORNRED_THREADS must be a positive integer, got {raw:?}"),
            )),
        },
    }
}

fn dispatch(cli: &Cli, threads: usize) -> Result<CmdOutput, CliError> {
    match cli.command {
        Command::Series => cmd_series(cli),
        Command::Eval => cmd_eval(cli),
        Command::Reduce => cmd_reduce(cli),
        Command::MbSum => cmd_mb_sum(cli),
        Command::MbQuad => cmd_mb_quad(cli),
        Command::EpsExpand => cmd_eps_expand(cli),
        Command::Check => cmd_check(cli, threads),
    }
}

fn read_payload(input: &str) -> Result<String, CliError> {
    if input == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::new("io", format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read_to_string(input).map_err(|e| CliError::new("io", format!("{input}: {e}")))
    }
}

fn parse_payload<T: serde::de::DeserializeOwned>(cli: &Cli) -> Result<T, CliError> {
    let raw = read_payload(&cli.input)?;
    serde_json::from_str(&raw).map_err(|e| CliError::new("parse", format!("payload: {e}")))
}

/// A scalar in a payload: a JSON number, an exact-rational or float string,
/// or an `[re, im]` pair.
#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarIn {
    Num(f64),
    Pair([f64; 2]),
    Str(String),
}

impl ScalarIn {
    fn to_complex(&self, name: &str) -> Result<Complex64, CliError> {
        match self {
            ScalarIn::Num(v) => Ok(Complex64::new(*v, 0.0)),
            ScalarIn::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ScalarIn::Str(s) => {
                if let Ok(r) = s.parse::<Rational>() {
                    Ok(Complex64::new(r.to_f64(), 0.0))
                } else if let Ok(v) = s.parse::<f64>() {
                    Ok(Complex64::new(v, 0.0))
                } else {
                    Err(CliError::field(
                        name,
                        format!("cannot read {s:?} as a rational or float"),
                    ))
                }
            }
        }
    }

    fn to_real(&self, name: &str) -> Result<f64, CliError> {
        let z = self.to_complex(name)?;
        if z.im != 0.0 {
            return Err(CliError::field(name, "must be real"));
        }
        Ok(z.re)
    }
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

fn complex_output(v: Complex64) -> Result<CmdOutput, CliError> {
    let text = if v.im == 0.0 {
        format!("{}", v.re)
    } else {
        format!("{} {:+}i", v.re, v.im)
    };
    CmdOutput::ok(&ComplexOut { re: v.re, im: v.im }, text)
}

// ---------------------------------------------------------------------------
// series
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct SpecPayload {
    #[serde(flatten)]
    spec: AnySpec,
}

#[derive(Serialize)]
struct SeriesOut {
    coefficients: Vec<String>,
}

#[derive(Serialize)]
struct HornCoeffOut {
    m: Vec<u32>,
    c: String,
}

#[derive(Serialize)]
struct HornTableOut {
    arity: usize,
    order: usize,
    coefficients: Vec<HornCoeffOut>,
}

fn cmd_series(cli: &Cli) -> Result<CmdOutput, CliError> {
    let payload: SpecPayload = parse_payload(cli)?;
    match payload.spec {
        AnySpec::PFQ(f) => {
            let s = f.truncated_series(cli.order)?;
            let coefficients: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
            let text = coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| format!("z^{k}: {c}"))
                .collect::<Vec<_>>()
                .join("\n");
            CmdOutput::ok(&SeriesOut { coefficients }, text)
        }
        AnySpec::Horn(h) => {
            let table = h.truncated_series(cli.order)?;
            let coefficients: Vec<HornCoeffOut> = table
                .coeffs
                .iter()
                .map(|(m, c)| HornCoeffOut {
                    m: m.clone(),
                    c: c.to_string(),
                })
                .collect();
            let text = coefficients
                .iter()
                .map(|e| {
                    let idx: Vec<String> = e.m.iter().map(|v| v.to_string()).collect();
                    format!("({}): {}", idx.join(","), e.c)
                })
                .collect::<Vec<_>>()
                .join("\n");
            CmdOutput::ok(
                &HornTableOut {
                    arity: table.arity,
                    order: table.order,
                    coefficients,
                },
                text,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct EvalPayload {
    #[serde(flatten)]
    spec: AnySpec,
    z: Option<ScalarIn>,
    x: Option<Vec<ScalarIn>>,
    eps: Option<ScalarIn>,
}

fn cmd_eval(cli: &Cli) -> Result<CmdOutput, CliError> {
    let payload: EvalPayload = parse_payload(cli)?;
    let eps = match &payload.eps {
        Some(e) => e.to_real("eps")?,
        None => 0.0,
    };
    let value = match &payload.spec {
        AnySpec::PFQ(f) => {
            if payload.x.is_some() {
                return Err(CliError::field("x", "only valid for a horn spec"));
            }
            let z = payload
                .z
                .as_ref()
                .ok_or_else(|| CliError::field("z", "required for a pFq evaluation"))?
                .to_complex("z")?;
            eval_pfq(f, z, eps, cli.rel_tol, cli.term_cap)?
        }
        AnySpec::Horn(h) => {
            if payload.z.is_some() {
                return Err(CliError::field("z", "only valid for a pFq spec"));
            }
            let xs = payload
                .x
                .as_ref()
                .ok_or_else(|| CliError::field("x", "required for a horn evaluation"))?;
            let mut point = Vec::with_capacity(xs.len());
            for (i, s) in xs.iter().enumerate() {
                point.push(s.to_complex(&format!("x[{i}]"))?);
            }
            eval_horn(h, &point, eps, cli.rel_tol, cli.term_cap)?
        }
    };
    complex_output(value)
}

// ---------------------------------------------------------------------------
// reduce
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReducePayload {
    #[serde(rename = "pFq")]
    pfq: PFQSpec,
    upper_shifts: Option<Vec<i64>>,
    lower_shifts: Option<Vec<i64>>,
}

#[derive(Serialize)]
struct ReduceOut {
    #[serde(rename = "R")]
    r: String,
    #[serde(rename = "P")]
    p: Vec<String>,
    verified_order: usize,
}

fn cmd_reduce(cli: &Cli) -> Result<CmdOutput, CliError> {
    let payload: ReducePayload = parse_payload(cli)?;
    let f = payload.pfq;
    let upper = payload.upper_shifts.unwrap_or_else(|| vec![0; f.p()]);
    let lower = payload.lower_shifts.unwrap_or_else(|| vec![0; f.q()]);
    let result = reduce(&f, &upper, &lower)?;
    let mut verified_order = result.verified_order();
    if cli.order > verified_order {
        let shifted = shifted_spec(&f, &upper, &lower)?;
        certify_relation(
            &f,
            &shifted,
            result.prefactor_r(),
            result.pcoeffs(),
            cli.order,
        )?;
        verified_order = cli.order;
    }
    let mut p: Vec<String> = result.pcoeffs().iter().map(|q| q.to_string()).collect();
    while p.len() > 1 && result.pcoeffs()[p.len() - 1].is_zero() {
        p.pop();
    }
    let text = {
        let mut lines = vec![format!("R = {}", result.prefactor_r())];
        for (k, pk) in p.iter().enumerate() {
            lines.push(format!("P{k} = {pk}"));
        }
        lines.push(format!("verified through series order {verified_order}"));
        lines.join("\n")
    };
    CmdOutput::ok(
        &ReduceOut {
            r: result.prefactor_r().to_string(),
            p,
            verified_order,
        },
        text,
    )
}

// ---------------------------------------------------------------------------
// mb-sum / mb-quad
// ---------------------------------------------------------------------------

fn residue_sum_text(rs: &ResidueSum) -> String {
    let pre = &rs.prefactor;
    let mut factors = Vec::new();
    if !pre.coeff.is_one() {
        factors.push(pre.coeff.to_string());
    }
    for g in &pre.gamma_num {
        factors.push(format!("Gamma({g})"));
    }
    let mut prefactor = if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join("*")
    };
    if !pre.gamma_den.is_empty() {
        let den: Vec<String> = pre
            .gamma_den
            .iter()
            .map(|g| format!("Gamma({g})"))
            .collect();
        prefactor = format!("{prefactor}/({})", den.join("*"));
    }
    let sign = if rs.arg_sign < 0 { "-" } else { "" };
    format!(
        "side: {}\nprefactor: {} * x^({})\nseries: {} at z = {}x^{}\nentire: {}",
        rs.side, prefactor, pre.x_power, rs.f, sign, rs.arg_power, rs.entire
    )
}

fn cmd_mb_sum(cli: &Cli) -> Result<CmdOutput, CliError> {
    let mb: MBIntegrand = parse_payload(cli)?;
    let rs = residue_sum(&mb)?;
    let text = residue_sum_text(&rs);
    CmdOutput::ok(&rs, text)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MbQuadPayload {
    integrand: MBIntegrand,
    x: ScalarIn,
    eps: Option<ScalarIn>,
    t_max: Option<f64>,
    n_points: Option<usize>,
}

fn cmd_mb_quad(cli: &Cli) -> Result<CmdOutput, CliError> {
    let payload: MbQuadPayload = parse_payload(cli)?;
    let x = payload.x.to_real("x")?;
    let eps = match &payload.eps {
        Some(e) => e.to_real("eps")?,
        None => 0.0,
    };
    let t_max = payload.t_max.unwrap_or(40.0);
    let n_points = payload.n_points.unwrap_or(4001);
    let value = contour_quadrature(&payload.integrand, x, eps, t_max, n_points)?;
    complex_output(value)
}

// ---------------------------------------------------------------------------
// eps-expand
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EpsExpandPayload {
    #[serde(rename = "pFq")]
    pfq: PFQSpec,
    highest: i64,
    z_order: Option<usize>,
}

fn cmd_eps_expand(cli: &Cli) -> Result<CmdOutput, CliError> {
    let payload: EpsExpandPayload = parse_payload(cli)?;
    let z_order = payload.z_order.unwrap_or(cli.order);
    let expansion = laurent_expand(&payload.pfq, payload.highest, z_order)?;
    let mut lines = Vec::new();
    for k in expansion.orders() {
        let row = expansion.series(k).unwrap_or(&[]);
        let cs: Vec<String> = row.iter().map(|c| c.to_string()).collect();
        lines.push(format!("eps^{k}: {}", cs.join(", ")));
    }
    CmdOutput::ok(&expansion, lines.join("\n"))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckOut {
    pass: bool,
    entries: Vec<EntryReport>,
}

/// Run the per-entry checks, fanning out across at most `threads` workers.
/// Reports come back sorted by entry name either way, so the fan-out is
/// observationally identical to the sequential run.
fn run_reports(entries: &[CatalogEntry], threads: usize) -> Result<Vec<EntryReport>, Error> {
    if threads <= 1 || entries.len() <= 1 {
        return check_catalog(entries);
    }
    let workers = threads.min(entries.len());
    let chunk = entries.len().div_ceil(workers);
    let per_chunk: Vec<Result<Vec<EntryReport>, Error>> = std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .chunks(chunk)
            .map(|c| scope.spawn(move || check_catalog(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("catalog checker thread panicked"))
            .collect()
    });
    let mut reports = Vec::with_capacity(entries.len());
    for r in per_chunk {
        reports.extend(r?);
    }
    reports.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(reports)
}

fn cmd_check(cli: &Cli, threads: usize) -> Result<CmdOutput, CliError> {
    let path = cli
        .catalog
        .as_ref()
        .ok_or_else(|| CliError::field("--catalog", "the check command requires a catalog file"))?;
    let entries = load_catalog(path)?;
    let reports = run_reports(&entries, threads)?;
    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    let pass = failing.is_empty();
    let mut lines: Vec<String> = reports
        .iter()
        .map(|r| {
            let counts: Vec<String> = r
                .counts
                .iter()
                .map(|b| b.nontrivial_count.to_string())
                .collect();
            let verdict = if r.pass { "pass" } else { "FAIL" };
            if r.uniform {
                format!(
                    "{}: {} (term counts [{}]; computed {}, expected {})",
                    r.name,
                    verdict,
                    counts.join(", "),
                    r.computed,
                    r.expected
                )
            } else {
                format!(
                    "{}: {} (non-uniform term counts [{}])",
                    r.name,
                    verdict,
                    counts.join(", ")
                )
            }
        })
        .collect();
    lines.push(if pass {
        format!("catalog: pass ({} entries)", reports.len())
    } else {
        format!(
            "catalog: FAIL ({} of {} entries: {})",
            failing.len(),
            reports.len(),
            failing.join(", ")
        )
    });
    let out = CmdOutput {
        json: serde_json::to_string(&CheckOut {
            pass,
            entries: reports,
        })
        .map_err(CliError::encode)?,
        text: lines.join("\n"),
        violation: !pass,
    };
    Ok(out)
}
