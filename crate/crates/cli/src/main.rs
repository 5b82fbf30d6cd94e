//! `nehari`: build, certify and measure the polydisc Hankel construction.
//!
//! Exit codes: 0 success, 1 certification or solver failure, 2 invalid
//! input, 3 quadrature budget exceeded.

mod commands;
mod human;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nehari_core::poly_torus::DEFAULT_QUADRATURE_BUDGET;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "nehari", version, about = "Lower-bound certificates for Nehari's theorem on the polydisc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify the construction for one even dimension.
    Certify(CertifyArgs),
    /// Certify every even dimension in a range and fit the growth of C_d.
    Sweep(SweepArgs),
    /// Compute one norm of a polynomial or symbol read from JSON.
    Norm(NormArgs),
    /// Dump the symbol, extremal polynomial, index set and Schur weights.
    Construct(ConstructArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Profile {
    Default,
    Strict,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "default")]
    tol_profile: Profile,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo samples for the L1 cross-check.
    #[arg(long, default_value_t = nehari_core::certificates::DEFAULT_MC_SAMPLES)]
    samples: usize,
    /// Largest admissible dimension.
    #[arg(long, default_value_t = nehari_core::certificates::DEFAULT_MAX_D)]
    max_d: usize,
    /// Maximum number of tensor-quadrature evaluations.
    #[arg(long, env = "NEHARI_QUAD_BUDGET", default_value_t = DEFAULT_QUADRATURE_BUDGET)]
    budget: u64,
    /// Include wall-clock timings (makes the output non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    d: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    d_min: usize,
    #[arg(long)]
    d_max: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum NormKind {
    L1,
    L2,
    Hankel,
    Schur,
    Wf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Quad,
    Mc,
    Separable,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[arg(long, value_enum)]
    kind: NormKind,
    /// Polynomial JSON: `{"d": 2, "terms": [{"n": 2, "re": 1.0}, ...]}`.
    #[arg(long)]
    poly: PathBuf,
    /// Symbol for the dual bound of `wf`; defaults to the polynomial itself.
    #[arg(long)]
    symbol: Option<PathBuf>,
    /// Integration method for `l1` and `l2`.
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = nehari_core::poly_torus::DEFAULT_NODES_PER_DIM)]
    nodes: usize,
    #[arg(long, default_value_t = nehari_core::certificates::DEFAULT_MC_SAMPLES)]
    samples: usize,
    #[arg(long, env = "NEHARI_QUAD_BUDGET", default_value_t = DEFAULT_QUADRATURE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = nehari_core::certificates::DEFAULT_MAX_D)]
    max_d: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INVALID } else { EXIT_OK });
        }
    };
    let outcome = match cli.command {
        Command::Certify(args) => commands::certify(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Norm(args) => commands::norm(args),
        Command::Construct(args) => commands::construct(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
