//! Command-line front end: `solve`, `verify`, `constants`, and `eval`.
//!
//! Every command is deterministic for fixed flags: summation orders are
//! fixed, nothing depends on wall-clock time except the manifest timestamp
//! inside JSON reports, and re-running `solve` with identical flags produces
//! a byte-identical zeros file.
//!
//! Exit codes are part of the contract:
//!
//! * 0 — success (for `solve`: converged and certified);
//! * 1 — numerical failure (no convergence, singular system);
//! * 2 — converged but at least one certificate failed;
//! * 64 — usage error (bad flags or flag values);
//! * 65 — request outside the validity range of the data (e.g. evaluation
//!   beyond the tail model);
//! * 66 — missing or corrupt input file.
//!
//! Diagnostics go to standard error prefixed `error:` / `warn:`.

use crate::extremal::{sinc_residual, ConstantBracket, PhiEvaluator};
use crate::seqspace::{deltas_to_zeros, CoeffSequence};
use crate::solver::{
    certify_ball, evaluate_solution, fixed_point_solve, BallCertificates, SolveReport,
    SolverConfig, LOW_TRUNCATION,
};
use crate::Error;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CERTIFICATE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_RANGE: i32 = 65;
pub const EXIT_INPUT: i32 = 66;

const SCHEMA_VERSION: u32 = 1;

/// Fixed-point computation of the extremal function's zeros and constants.
#[derive(Debug, Parser)]
#[command(name = "pw-extremal", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the zero-perturbation equation and write zeros + report.
    Solve(SolveArgs),
    /// Re-check certificates and the sine-integral residual of a zeros file.
    Verify(VerifyArgs),
    /// Compute the L1 norm and the lower constant bracket.
    Constants(ConstantsArgs),
    /// Evaluate the extremal function at points or on a grid.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Operator truncation N (at least 8).
    #[arg(long = "n-truncate", default_value_t = 400)]
    n_truncate: usize,
    /// l2 step-norm tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Iteration budget.
    #[arg(long = "max-iter", default_value_t = 30)]
    max_iter: usize,
    /// Gauss-Legendre order for the quadratures (1..=64).
    #[arg(long = "quad-order", default_value_t = 8)]
    quad_order: usize,
    /// Route operator applies through the FFT path.
    #[arg(long = "fast-apply", default_value_t = false)]
    fast_apply: bool,
    /// Zeros output file.
    #[arg(long, default_value = "zeros.csv")]
    out: PathBuf,
    /// JSON report output file.
    #[arg(long, default_value = "report.json")]
    report: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Zeros file to verify.
    #[arg(long, default_value = "zeros.csv")]
    input: PathBuf,
    /// Gauss-Legendre order for the re-computation.
    #[arg(long = "quad-order", default_value_t = 8)]
    quad_order: usize,
    /// Optional JSON report output file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    /// Zeros file; omitted means a fresh solve.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Truncation for the fresh solve when no input file is given.
    #[arg(long = "n-truncate", default_value_t = 400)]
    n_truncate: usize,
    /// Number of zero-to-zero panels for the L1 integration.
    #[arg(long = "n-zeros", default_value_t = 300)]
    n_zeros: usize,
    /// Absolute tolerance budget for the L1 integration.
    #[arg(long = "l1-tol", default_value_t = 1e-9)]
    l1_tol: f64,
    /// JSON output file.
    #[arg(long, default_value = "constants.json")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Zeros file providing the evaluator.
    #[arg(long, default_value = "zeros.csv")]
    input: PathBuf,
    /// Evaluate at a single point and print the value.
    #[arg(long, conflicts_with_all = ["from", "to", "step"])]
    at: Option<f64>,
    /// Grid start.
    #[arg(long, requires = "to", requires = "step")]
    from: Option<f64>,
    /// Grid end.
    #[arg(long, requires = "from")]
    to: Option<f64>,
    /// Grid spacing.
    #[arg(long, requires = "from")]
    step: Option<f64>,
    /// CSV output file for grid evaluation.
    #[arg(long, default_value = "phi.csv")]
    out: PathBuf,
}

/// Parses `std::env::args` and runs the selected command, returning the
/// process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return EXIT_OK;
            }
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Constants(args) => cmd_constants(&args),
        Command::Eval(args) => cmd_eval(&args),
    }
}

fn fail(code: i32, message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    code
}

// ---------------------------------------------------------------- solve --

fn cmd_solve(args: &SolveArgs) -> i32 {
    let cfg = SolverConfig {
        n: args.n_truncate,
        max_iter: args.max_iter,
        tol: args.tol,
        quad_order: args.quad_order,
        fast_apply: args.fast_apply,
    };
    if let Err(err) = cfg.validate() {
        return fail(EXIT_USAGE, err);
    }
    let report = match fixed_point_solve(&cfg) {
        Ok(report) => report,
        Err(Error::NoConvergence { report }) => {
            return fail(
                EXIT_NUMERICAL,
                format!(
                    "no convergence after {} iterations (last step {:.3e})",
                    report.iterations,
                    report.last_step_norm()
                ),
            );
        }
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };
    let certificates = match certify_ball(&report) {
        Ok(c) => c,
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };

    let csv = render_zeros_csv(&report.delta);
    if let Err(err) = std::fs::write(&args.out, &csv) {
        return fail(EXIT_NUMERICAL, format!("cannot write {}: {err}", args.out.display()));
    }
    let manifest = RunManifest::new(vec![ArtifactDigest::of(&args.out, csv.as_bytes())]);
    let json = SolveJson {
        schema_version: SCHEMA_VERSION,
        command: "solve",
        report: &report,
        certificates: &certificates,
        manifest,
    };
    if let Err(code) = write_json(&args.report, &json) {
        return code;
    }

    let zeros = report.zeros().expect("converged deltas stay in their cells");
    println!(
        "solved N={} in {} iterations (last step {:.3e}, residual {:.3e})",
        cfg.n,
        report.iterations,
        report.last_step_norm(),
        report.residual
    );
    println!(
        "tau_1..4: {:.10} {:.10} {:.10} {:.10}",
        zeros.tau(1),
        zeros.tau(2),
        zeros.tau(3),
        zeros.tau(4)
    );
    print!("{}", certificate_table(&certificates));
    println!(
        "wrote {} and {}",
        args.out.display(),
        args.report.display()
    );
    if certificates.all_pass {
        EXIT_OK
    } else {
        eprintln!("warn: certificate failure, see report");
        EXIT_CERTIFICATE
    }
}

// --------------------------------------------------------------- verify --

/// Slack added to the residual threshold for a file holding only the first
/// N coordinates of a longer solution: by Cauchy–Schwarz the dropped tail
/// can contribute up to ‖δ_tail‖·√(Σ_{n>N} a²)/π ≤ 0.13·√(8/N)/π for
/// k ≤ N/2.
fn residual_slack(n: usize) -> f64 {
    0.13 * (8.0 / n as f64).sqrt() / std::f64::consts::PI
}

/// Absolute residual floor expected from a converged solve.
const RESIDUAL_FLOOR: f64 = 1e-6;

#[derive(Debug, Serialize)]
struct ResidualCertificate {
    k_max: usize,
    max_abs_residual: f64,
    threshold: f64,
    slack: f64,
    pass: bool,
}

fn cmd_verify(args: &VerifyArgs) -> i32 {
    let delta = match read_zeros_csv(&args.input) {
        Ok(d) => d,
        Err(message) => return fail(EXIT_INPUT, message),
    };
    let n = delta.len();
    let cfg = SolverConfig {
        n,
        quad_order: args.quad_order,
        ..SolverConfig::default()
    };
    if let Err(err) = cfg.validate() {
        return fail(EXIT_INPUT, format!("{}: {err}", args.input.display()));
    }
    let report = match evaluate_solution(&delta, &cfg) {
        Ok(r) => r,
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };
    let mut certificates = match certify_ball(&report) {
        Ok(c) => c,
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };
    if n < LOW_TRUNCATION {
        eprintln!(
            "warn: truncation N={n} below {LOW_TRUNCATION}; tail models are crude, widening certificate bounds"
        );
        widen_for_low_truncation(&mut certificates, n);
    }

    let zeros = match deltas_to_zeros(&delta) {
        Ok(z) => z,
        Err(err) => return fail(EXIT_INPUT, format!("{}: {err}", args.input.display())),
    };
    let k_max = (n / 2).clamp(1, 50);
    let max_abs_residual = (1..=k_max)
        .map(|k| sinc_residual(&zeros, k).abs())
        .fold(0.0f64, f64::max);
    let slack = residual_slack(n);
    let residual = ResidualCertificate {
        k_max,
        max_abs_residual,
        threshold: RESIDUAL_FLOOR + slack,
        slack,
        pass: max_abs_residual <= RESIDUAL_FLOOR + slack,
    };

    print!("{}", certificate_table(&certificates));
    println!(
        "{:<18} {:>12.4e} (threshold {:.4e}, k <= {})  {}",
        "sinc_residual",
        residual.max_abs_residual,
        residual.threshold,
        residual.k_max,
        if residual.pass { "PASS" } else { "FAIL" }
    );
    let all_pass = certificates.all_pass && residual.pass;
    println!(
        "verification {} for {} (N={n})",
        if all_pass { "passed" } else { "FAILED" },
        args.input.display()
    );

    if let Some(path) = &args.report {
        let json = VerifyJson {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            input: args.input.display().to_string(),
            certificates: &certificates,
            residual: &residual,
            all_pass,
            manifest: RunManifest::new(Vec::new()),
        };
        if let Err(code) = write_json(path, &json) {
            return code;
        }
    }
    if all_pass {
        EXIT_OK
    } else {
        EXIT_CERTIFICATE
    }
}

/// Below [`LOW_TRUNCATION`] the 1/n tail fits have no asymptotic regime to
/// fit, so the norm certificates get an extra 0.1/√N of slack; contraction
/// is dimension-free and keeps its bound.
fn widen_for_low_truncation(certs: &mut BallCertificates, n: usize) {
    let slack = 0.1 / (n as f64).sqrt();
    for cert in certs
        .certificates
        .iter_mut()
        .filter(|c| c.name != "contraction")
    {
        cert.bound += slack;
        cert.margin = cert.bound - cert.effective;
        cert.pass = cert.effective <= cert.bound;
    }
    certs.all_pass = certs.certificates.iter().all(|c| c.pass);
    certs.low_truncation = true;
}

// ------------------------------------------------------------ constants --

fn cmd_constants(args: &ConstantsArgs) -> i32 {
    let (delta, source) = match &args.input {
        Some(path) => match read_zeros_csv(path) {
            Ok(d) => (d, path.display().to_string()),
            Err(message) => return fail(EXIT_INPUT, message),
        },
        None => {
            let cfg = SolverConfig {
                n: args.n_truncate,
                ..SolverConfig::default()
            };
            if let Err(err) = cfg.validate() {
                return fail(EXIT_USAGE, err);
            }
            match fixed_point_solve(&cfg) {
                Ok(report) => (report.delta, format!("fresh solve at N={}", cfg.n)),
                Err(err) => return fail(EXIT_NUMERICAL, err),
            }
        }
    };
    let zeros = match deltas_to_zeros(&delta) {
        Ok(z) => z,
        Err(err) => return fail(EXIT_INPUT, err),
    };
    let evaluator = match PhiEvaluator::from_zeros(zeros) {
        Ok(ev) => ev,
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };
    if args.n_zeros + 5 > evaluator.tail_start() {
        return fail(
            EXIT_USAGE,
            format!(
                "--n-zeros {} needs at least {} tabulated zeros, input has {}",
                args.n_zeros,
                args.n_zeros + 5,
                evaluator.tail_start()
            ),
        );
    }
    if !(args.l1_tol > 0.0) {
        return fail(EXIT_USAGE, "--l1-tol must be positive");
    }
    let bracket = match evaluator.constant_bracket(args.n_zeros, args.l1_tol) {
        Ok(b) => b,
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };

    println!(
        "phi L1 norm:       {:.12} (tail {:.3e}, band {:.3e}, {} panels)",
        bracket.phi_l1.value,
        bracket.phi_l1.tail_estimate,
        bracket.phi_l1.uncertainty,
        bracket.phi_l1.panels
    );
    println!("lower bound 1/L1:  {:.12}", bracket.lower);
    println!(
        "reference bracket: [{:.10}, {:.10}]",
        bracket.reference_lower, bracket.reference_upper
    );
    let gap = if bracket.lower < bracket.reference_lower {
        bracket.reference_lower - bracket.lower
    } else if bracket.lower > bracket.reference_upper {
        bracket.lower - bracket.reference_upper
    } else {
        0.0
    };
    println!("gap to bracket:    {:.3e}", gap);
    println!("note: the sup-norm upper-bound term is not computed; the bound is one-sided");

    let json = ConstantsJson {
        schema_version: SCHEMA_VERSION,
        command: "constants",
        source,
        n_zeros: args.n_zeros,
        bracket: &bracket,
        note: "lower bound only; the sup-norm term closing the bracket from above is not computed",
        manifest: RunManifest::new(Vec::new()),
    };
    if let Err(code) = write_json(&args.out, &json) {
        return code;
    }
    println!("wrote {}", args.out.display());
    EXIT_OK
}

// ----------------------------------------------------------------- eval --

fn cmd_eval(args: &EvalArgs) -> i32 {
    let delta = match read_zeros_csv(&args.input) {
        Ok(d) => d,
        Err(message) => return fail(EXIT_INPUT, message),
    };
    let zeros = match deltas_to_zeros(&delta) {
        Ok(z) => z,
        Err(err) => return fail(EXIT_INPUT, format!("{}: {err}", args.input.display())),
    };
    let evaluator = match PhiEvaluator::from_zeros(zeros) {
        Ok(ev) => ev,
        Err(err) => return fail(EXIT_NUMERICAL, err),
    };

    if let Some(x) = args.at {
        return match evaluator.eval(x) {
            Ok(value) => {
                println!("{value}");
                EXIT_OK
            }
            Err(err @ Error::OutOfRange { .. }) => fail(EXIT_RANGE, err),
            Err(err) => fail(EXIT_NUMERICAL, err),
        };
    }

    let (Some(from), Some(to), Some(step)) = (args.from, args.to, args.step) else {
        return fail(EXIT_USAGE, "eval needs either --at or --from/--to/--step");
    };
    if !(step > 0.0) {
        return fail(EXIT_USAGE, "--step must be positive");
    }
    if from > to {
        return fail(EXIT_USAGE, "--from must not exceed --to");
    }
    let limit = evaluator.x_limit();
    if from.abs() > limit || to.abs() > limit {
        return fail(
            EXIT_RANGE,
            format!("grid [{from}, {to}] outside tail-model range |x| <= {limit}"),
        );
    }
    let count = ((to - from) / step).round() as usize + 1;
    let mut csv = String::from("x,phi\n");
    for i in 0..count {
        let x = from + step * i as f64;
        let x = if x > limit { limit } else { x };
        match evaluator.eval(x) {
            Ok(value) => {
                let _ = writeln!(csv, "{x},{value}");
            }
            Err(err) => return fail(EXIT_RANGE, err),
        }
    }
    if let Err(err) = std::fs::write(&args.out, &csv) {
        return fail(EXIT_NUMERICAL, format!("cannot write {}: {err}", args.out.display()));
    }
    println!("wrote {} ({count} rows)", args.out.display());
    EXIT_OK
}

// ------------------------------------------------------------- file I/O --

/// Renders the zeros table as CSV. Floats print in the shortest
/// representation that parses back exactly, so identical solves produce
/// byte-identical files.
pub fn render_zeros_csv(delta: &CoeffSequence) -> String {
    let mut out = String::from("n,tau_n,delta_n\n");
    for n in 1..=delta.len() {
        let d = delta.get(n);
        let tau = n as f64 + 0.5 - d;
        let _ = writeln!(out, "{n},{tau},{d}");
    }
    out
}

/// Reads a zeros CSV back into the deviation sequence, checking the header,
/// the 1-based row numbering, and the tau/delta consistency of each row.
pub fn read_zeros_csv(path: &Path) -> std::result::Result<CoeffSequence, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| format!("cannot read {}: {err}", path.display()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("n,tau_n,delta_n") => {}
        other => {
            return Err(format!(
                "{}: expected header n,tau_n,delta_n, found {:?}",
                path.display(),
                other.unwrap_or("<empty>")
            ))
        }
    }
    let mut deltas = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(n), Some(tau), Some(delta), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(format!("{}: row {} malformed", path.display(), row + 2));
        };
        let parse = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|_| format!("{}: row {}: bad {what} {s:?}", path.display(), row + 2))
        };
        let n_value: usize = n
            .parse()
            .map_err(|_| format!("{}: row {}: bad index {n:?}", path.display(), row + 2))?;
        if n_value != row + 1 {
            return Err(format!(
                "{}: row {}: expected index {}, found {n_value}",
                path.display(),
                row + 2,
                row + 1
            ));
        }
        let tau = parse(tau, "tau")?;
        let delta = parse(delta, "delta")?;
        if (tau - (n_value as f64 + 0.5 - delta)).abs() > 1e-9 {
            return Err(format!(
                "{}: row {}: tau and delta disagree",
                path.display(),
                row + 2
            ));
        }
        deltas.push(delta);
    }
    if deltas.is_empty() {
        return Err(format!("{}: no data rows", path.display()));
    }
    CoeffSequence::new(deltas).map_err(|err| format!("{}: {err}", path.display()))
}

fn certificate_table(certs: &BallCertificates) -> String {
    let mut out = String::new();
    for c in &certs.certificates {
        let _ = writeln!(
            out,
            "{:<18} {:>12.6} (tail {:.3e}) <= {:<6} margin {:+.4e}  {}",
            c.name,
            c.measured,
            c.tail,
            c.bound,
            c.margin,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    out
}

#[derive(Debug, Serialize)]
struct ArtifactDigest {
    path: String,
    sha256: String,
}

impl ArtifactDigest {
    fn of(path: &Path, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        let sha256 = digest.iter().fold(String::new(), |mut acc, b| {
            let _ = write!(acc, "{b:02x}");
            acc
        });
        Self {
            path: path.display().to_string(),
            sha256,
        }
    }
}

#[derive(Debug, Serialize)]
struct RunManifest {
    timestamp: String,
    version: &'static str,
    artifacts: Vec<ArtifactDigest>,
}

impl RunManifest {
    fn new(artifacts: Vec<ArtifactDigest>) -> Self {
        Self {
            timestamp: chrono::Utc::now().to_rfc3339(),
            version: env!("CARGO_PKG_VERSION"),
            artifacts,
        }
    }
}

#[derive(Debug, Serialize)]
struct SolveJson<'a> {
    schema_version: u32,
    command: &'static str,
    report: &'a SolveReport,
    certificates: &'a BallCertificates,
    manifest: RunManifest,
}

#[derive(Debug, Serialize)]
struct VerifyJson<'a> {
    schema_version: u32,
    command: &'static str,
    input: String,
    certificates: &'a BallCertificates,
    residual: &'a ResidualCertificate,
    all_pass: bool,
    manifest: RunManifest,
}

#[derive(Debug, Serialize)]
struct ConstantsJson<'a> {
    schema_version: u32,
    command: &'static str,
    source: String,
    n_zeros: usize,
    bracket: &'a ConstantBracket,
    note: &'static str,
    manifest: RunManifest,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), i32> {
    let body = serde_json::to_string_pretty(value)
        .map_err(|err| fail(EXIT_NUMERICAL, format!("cannot serialize report: {err}")))?;
    std::fs::write(path, body + "\n")
        .map_err(|err| fail(EXIT_NUMERICAL, format!("cannot write {}: {err}", path.display())))
}
