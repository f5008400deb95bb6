//! `svineq`: command-line front end for the inequality catalog.
//!
//! stdout carries JSON lines only; human diagnostics go to stderr (add
//! `--pretty` for a readable rendering there). The exit code is the
//! machine-readable verdict:
//!
//! - 0: all checked bounds hold / nothing found
//! - 1: a violation was confirmed or found
//! - 2: usage, file, or config error
//! - 3: numerical failure (SVD or oracle did not converge)
//!
//! `SVINEQ_THREADS` caps worker threads for the parallel subcommands without
//! changing any output.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use svineq_core::catalog::{
    catalog_list, check, check_all, verify_chain, CatalogError, CheckReport, InequalityId,
    TolerancePolicy,
};
use svineq_core::matrix::{Field, MatrixError, MatrixF, MatrixPair};
use svineq_core::search::{search, GeneratorKind, IndexPolicy, SearchConfig, SearchError};
use svineq_core::spectrum::SpectrumError;
use svineq_core::trace::{
    max_trace_closed_form, min_trace_closed_form, trace_oracle, OracleConfig, TraceError,
    TraceMode,
};

#[derive(Parser)]
#[command(name = "svineq", version, about = "Check, stress-test, and search singular-value inequalities for sums of matrices")]
struct Cli {
    /// Also render a human-readable summary on stderr.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ToleranceArgs {
    /// Absolute tolerance component.
    #[arg(long, default_value_t = 1e-10)]
    atol: f64,
    /// Relative tolerance component, scaled by ||A||_F + ||B||_F.
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
}

impl ToleranceArgs {
    fn policy(&self) -> TolerancePolicy {
        TolerancePolicy {
            atol: self.atol,
            rtol: self.rtol,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the inequality catalog, one JSON line per entry.
    Catalog,
    /// Evaluate one catalog inequality on a matrix pair.
    Check {
        /// Inequality id (see `svineq catalog`).
        #[arg(long)]
        ineq: String,
        /// Path to the A matrix (JSON).
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        /// Path to the B matrix (JSON).
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        /// Prefix-sum index k (1-based).
        #[arg(long)]
        k: Option<usize>,
        /// Per-index i (1-based); interchangeable with --k.
        #[arg(long)]
        i: Option<usize>,
        /// Evaluate every admissible index (default when no index is given).
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Verify the prefix-sum comparison chain for a matrix pair at one k.
    Chain {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Closed-form trace extremum over semi-unitary factors, optionally
    /// certified by the iterative oracle.
    Trace {
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long)]
        k: usize,
        /// "min" or "max".
        #[arg(long)]
        mode: String,
        /// Also run the alternating-maximization oracle.
        #[arg(long)]
        oracle: bool,
        /// Random restarts for the oracle.
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Seed for the oracle's restart streams.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized counterexample search against a catalog inequality.
    Search {
        #[arg(long)]
        ineq: String,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        /// "real" or "complex".
        #[arg(long, default_value = "real")]
        field: String,
        /// dense_gaussian, diagonal_gaussian, or diagonal_integer.
        #[arg(long = "gen", default_value = "dense_gaussian")]
        generator: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hill-climbing steps applied to the best candidate.
        #[arg(long = "refine", default_value_t = 0)]
        refine_steps: u64,
        /// Restrict scoring to a single 1-based index.
        #[arg(long)]
        index: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, MatrixError),
    Usage(String),
    Matrix(MatrixError),
    Catalog(CatalogError),
    Trace(TraceError),
    Search(SearchError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
            CliError::Parse(path, e) => write!(f, "cannot parse {}: {e}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Matrix(e) => write!(f, "{e}"),
            CliError::Catalog(e) => write!(f, "{e}"),
            CliError::Trace(e) => write!(f, "{e}"),
            CliError::Search(e) => write!(f, "{e}"),
        }
    }
}

fn spectrum_exit_code(e: &SpectrumError) -> i32 {
    match e {
        SpectrumError::Convergence { .. }
        | SpectrumError::Overflow { .. }
        | SpectrumError::Inconsistent { .. } => 3,
        SpectrumError::IndexOutOfRange { .. } | SpectrumError::LengthMismatch { .. } => 2,
    }
}

fn catalog_exit_code(e: &CatalogError) -> i32 {
    match e {
        CatalogError::Spectrum(s) => spectrum_exit_code(s),
        _ => 2,
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(..) | CliError::Parse(..) | CliError::Usage(_) | CliError::Matrix(_) => 2,
            CliError::Catalog(e) => catalog_exit_code(e),
            CliError::Trace(e) => match e {
                TraceError::NonConvergence { .. } => 3,
                TraceError::Spectrum(s) => spectrum_exit_code(s),
                _ => 2,
            },
            CliError::Search(e) => match e {
                SearchError::Catalog(c) => catalog_exit_code(c),
                _ => 2,
            },
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::Catalog(e)
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        CliError::Matrix(e)
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        CliError::Trace(e)
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        CliError::Search(e)
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("svineq: {e}");
            e.exit_code()
        }
    }
}

/// SVINEQ_THREADS caps worker threads; per-stream RNG keeps results
/// independent of the count.
fn configure_threads() {
    if let Ok(raw) = std::env::var("SVINEQ_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("svineq: ignoring invalid SVINEQ_THREADS={raw:?}"),
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Catalog => cmd_catalog(cli.pretty),
        Command::Check {
            ineq,
            a,
            b,
            k,
            i,
            all,
            tol,
        } => cmd_check(ineq, a, b, *k, *i, *all, &tol.policy(), cli.pretty),
        Command::Chain { a, b, k, tol } => cmd_chain(a, b, *k, &tol.policy(), cli.pretty),
        Command::Trace {
            b,
            k,
            mode,
            oracle,
            restarts,
            seed,
        } => cmd_trace(b, *k, mode, *oracle, *restarts, *seed, cli.pretty),
        Command::Search {
            ineq,
            rows,
            cols,
            field,
            generator,
            trials,
            seed,
            refine_steps,
            index,
        } => cmd_search(
            ineq,
            *rows,
            *cols,
            field,
            generator,
            *trials,
            *seed,
            *refine_steps,
            *index,
            cli.pretty,
        ),
    }
}

fn load_matrix(path: &Path) -> Result<MatrixF, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    MatrixF::from_json(&bytes).map_err(|e| CliError::Parse(path.to_path_buf(), e))
}

fn load_pair(a: &Path, b: &Path) -> Result<MatrixPair, CliError> {
    Ok(MatrixPair::new(load_matrix(a)?, load_matrix(b)?)?)
}

fn cmd_catalog(pretty: bool) -> Result<i32, CliError> {
    for entry in catalog_list() {
        println!("{}", serde_json::to_string(entry).expect("catalog serializes"));
        if pretty {
            eprintln!(
                "{:<20} {:<13} {:<11} {:<11} {}",
                entry.id.as_str(),
                format!("{:?}", entry.status),
                format!("{:?}", entry.index_mode),
                format!("{:?}", entry.shape_rule),
                entry.description
            );
        }
    }
    Ok(0)
}

fn render_report(report: &CheckReport, pretty: bool) {
    println!("{}", report.to_json());
    if pretty {
        eprintln!(
            "{} index {}: lhs={:.6e} rhs={:.6e} margin={:.6e} -> {}",
            report.ineq,
            report.index,
            report.lhs,
            report.rhs,
            report.margin,
            if report.holds { "holds" } else { "VIOLATED" }
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    ineq: &str,
    a: &Path,
    b: &Path,
    k: Option<usize>,
    i: Option<usize>,
    all: bool,
    policy: &TolerancePolicy,
    pretty: bool,
) -> Result<i32, CliError> {
    let id = InequalityId::from_str(ineq)?;
    let pair = load_pair(a, b)?;
    let index = match (k, i) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "--k and --i are interchangeable; give only one".into(),
            ))
        }
        (k, i) => k.or(i),
    };
    if all && index.is_some() {
        return Err(CliError::Usage("--all excludes --k/--i".into()));
    }
    let reports = match index {
        Some(idx) => vec![check(id, &pair, idx, policy)?],
        None => check_all(id, &pair, policy)?,
    };
    let mut violated = false;
    for report in &reports {
        violated |= !report.holds;
        render_report(report, pretty);
    }
    Ok(i32::from(violated))
}

fn cmd_chain(
    a: &Path,
    b: &Path,
    k: usize,
    policy: &TolerancePolicy,
    pretty: bool,
) -> Result<i32, CliError> {
    let pair = load_pair(a, b)?;
    let report = verify_chain(&pair, k, policy)?;
    println!("{}", report.to_json());
    if pretty {
        let c = report.chain();
        eprintln!(
            "chain k={}: {:.6e} >= {:.6e} = {:.6e} >= (signed max {:.6e}) >= {:.6e} -> {}",
            report.k,
            c[0],
            c[1],
            c[2],
            report.subset_max_signed,
            c[3],
            if report.holds { "holds" } else { "BROKEN" }
        );
    }
    Ok(i32::from(!report.holds))
}

#[derive(Serialize)]
struct TraceLine<'a> {
    k: usize,
    mode: TraceMode,
    closed_form: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<&'a MatrixF>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<&'a MatrixF>,
}

fn cmd_trace(
    b_path: &Path,
    k: usize,
    mode: &str,
    oracle: bool,
    restarts: usize,
    seed: u64,
    pretty: bool,
) -> Result<i32, CliError> {
    let mode = TraceMode::from_str(mode).map_err(CliError::Usage)?;
    let b = load_matrix(b_path)?;
    let closed_form = match mode {
        TraceMode::Max => max_trace_closed_form(&b, k)?,
        TraceMode::Min => min_trace_closed_form(&b, k)?,
    };

    let report = if oracle {
        let cfg = OracleConfig {
            seed,
            restarts,
            ..OracleConfig::default()
        };
        Some(trace_oracle(&b, k, mode, &cfg)?)
    } else {
        None
    };

    let line = TraceLine {
        k,
        mode,
        closed_form,
        oracle_value: report.as_ref().map(|r| r.oracle_value),
        gap: report.as_ref().map(|r| r.gap),
        iterations: report.as_ref().map(|r| r.iterations),
        u: report.as_ref().map(|r| &r.oracle_pair.u),
        v: report.as_ref().map(|r| &r.oracle_pair.v),
    };
    println!("{}", serde_json::to_string(&line).expect("trace line serializes"));
    if pretty {
        match &report {
            Some(r) => eprintln!(
                "trace {mode:?} k={k}: closed form {closed_form:.12e}, oracle {:.12e} (gap {:.3e}, {} iterations)",
                r.oracle_value, r.gap, r.iterations
            ),
            None => eprintln!("trace {mode:?} k={k}: closed form {closed_form:.12e}"),
        }
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    ineq: &str,
    rows: usize,
    cols: usize,
    field: &str,
    generator: &str,
    trials: u64,
    seed: u64,
    refine_steps: u64,
    index: Option<usize>,
    pretty: bool,
) -> Result<i32, CliError> {
    let config = SearchConfig {
        inequality: InequalityId::from_str(ineq)?,
        rows,
        cols,
        field: Field::from_str(field)?,
        generator: GeneratorKind::from_str(generator)?,
        trials,
        seed,
        refine_steps,
        index_policy: match index {
            Some(i) => IndexPolicy::Fixed(i),
            None => IndexPolicy::All,
        },
    };
    let result = search(&config)?;
    println!("{}", result.to_json());
    if pretty {
        if result.found {
            eprintln!(
                "violation of {} at index {} after {} trials: margin {:.6e} (tol {:.3e})",
                result.best_report.ineq,
                result.best_report.index,
                result.trials_used,
                result.best_report.margin,
                result.best_report.tol
            );
        } else {
            eprintln!(
                "no violation of {} in {} trials; worst margin {:.6e} (tol {:.3e})",
                result.best_report.ineq,
                result.trials_used,
                result.best_report.margin,
                result.best_report.tol
            );
        }
    }
    Ok(i32::from(result.found))
}
