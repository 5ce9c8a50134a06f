//! `cmmb`: command-line access to the Conway-Maxwell binomial and
//! multivariate Bernoulli toolkit.
//!
//! Exit status: 0 on success, 2 for invalid input (bad flags, domain or
//! capacity errors, unreadable or unwritable files), 3 when a solver or a
//! numeric routine fails.

mod commands;
mod law;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use law::parse_real;
use output::Format;

#[derive(Parser)]
#[command(name = "cmmb", version, about = "Conway-Maxwell binomial and multivariate Bernoulli laws")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Decimal places of real-valued output.
    #[arg(long, global = true, env = "CMMB_PRECISION", default_value_t = 8)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pmf of CMB_d(r, nu): rows (k, probability).
    Pmf(PmfArgs),
    /// Calibrate r so that E[W] = d p for each nu: rows (nu, r, mean, variance).
    Chain(ChainArgs),
    /// Strong Rayleigh check of CMB_d(., nu), or of a joint law given with --law.
    SrCheck(SrArgs),
    /// Long-format histogram data (nu, k, probability) of calibrated laws.
    Hist(HistArgs),
    /// Convex, supermodular or negative-association check.
    OrderCheck(OrderArgs),
    /// Seeded draws of W, of the exchangeable vector or of a thinned vector.
    Sample(SampleArgs),
    /// Weights of CMB_d(1/2, nu) over the symmetric extremal laws.
    Decompose(DecomposeArgs),
}

#[derive(Args)]
struct PmfArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_real)]
    r: f64,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    nu: f64,
}

#[derive(Args)]
struct ChainArgs {
    #[arg(long)]
    d: usize,
    /// Target marginal mean, e.g. 1/3.
    #[arg(long, value_parser = parse_real)]
    p: f64,
    /// Comma-separated values of nu.
    #[arg(long, value_parser = parse_real, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    nu_list: Vec<f64>,
    /// Absolute tolerance on |E[W] - d p|.
    #[arg(long, value_parser = parse_real, default_value = "1e-10")]
    tol: f64,
}

#[derive(Args)]
struct SrArgs {
    #[arg(long, required_unless_present = "law")]
    d: Option<usize>,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true, required_unless_present_any = ["threshold", "law"])]
    nu: Option<f64>,
    /// Test the pgf at this r instead of G_{d,nu} (numeric method only).
    #[arg(long, value_parser = parse_real, conflicts_with = "exact")]
    r: Option<f64>,
    /// Sturm sequence on exact integer coefficients (nu a nonnegative integer).
    #[arg(long, conflicts_with = "numeric")]
    exact: bool,
    /// Companion-matrix eigenvalues.
    #[arg(long)]
    numeric: bool,
    /// Relative tolerance for calling a numeric root real.
    #[arg(long, value_parser = parse_real, default_value = "1e-8")]
    rel_tol: f64,
    /// Bisect for the smallest SR nu in [lo, hi].
    #[arg(long, requires_all = ["lo", "hi"], conflicts_with_all = ["nu", "law"])]
    threshold: bool,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    lo: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    hi: Option<f64>,
    /// Bracket width at which bisection stops.
    #[arg(long, value_parser = parse_real, default_value = "1e-5")]
    tol: f64,
    /// Joint law (JSON file or inline spec): closed form when d = 3,
    /// random search for Rayleigh violations otherwise.
    #[arg(long, conflicts_with_all = ["d", "nu", "r"])]
    law: Option<String>,
    /// Random points tried when searching for a violation.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct HistArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_real)]
    p: f64,
    #[arg(long, value_parser = parse_real, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    nu_list: Vec<f64>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Cx,
    Sm,
    Na,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Candidate smaller law (cx, sm).
    #[arg(long, required_unless_present = "law")]
    lo: Option<String>,
    /// Candidate larger law (cx, sm).
    #[arg(long, required_unless_present = "law")]
    hi: Option<String>,
    /// Law to test for negative association (na).
    #[arg(long, conflicts_with_all = ["lo", "hi"])]
    law: Option<String>,
    /// Slack on the mean gap and on each stop-loss comparison (cx).
    #[arg(long, value_parser = parse_real, default_value = "1e-9")]
    tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    W,
    Exch,
    Thinned,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    what: What,
    #[arg(long, required_unless_present = "p")]
    d: Option<usize>,
    #[arg(long, value_parser = parse_real, required_unless_present = "p")]
    r: Option<f64>,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    nu: f64,
    /// Target means of a thinned vector, comma-separated, each in [0, 1/2].
    #[arg(long, value_parser = parse_real, value_delimiter = ',', conflicts_with_all = ["d", "r"])]
    p: Vec<f64>,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination for the draws; only the summary is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_parser = parse_real, allow_negative_numbers = true)]
    nu: f64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(cmmb::Error),
}

impl From<cmmb::Error> for CliError {
    fn from(e: cmmb::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(cmmb::Error::Domain(_) | cmmb::Error::Capacity { .. }) => 2,
            CliError::Lib(cmmb::Error::Solver { .. } | cmmb::Error::Numeric(_)) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
