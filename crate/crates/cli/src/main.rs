//! `nccalc`: evaluate, differentiate and law-check free noncommutative
//! functions from the command line. Reports go to stdout (or `--out`) as
//! JSON; a short human summary goes to stderr.

mod commands;
mod config;
mod exit;
mod exprs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{GlobalOpts, RunConfig};
use exprs::SpaceArg;

#[derive(Debug, Parser)]
#[command(
    name = "nccalc",
    version,
    about = "Calculus and law checks for free noncommutative functions"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct ExprOpts {
    /// Expression in X1..Xd (complex) or A1..Ad, B1..Bd (real pairs)
    #[arg(short = 'e', long = "expr")]
    expr: String,
    /// Number of variables; inferred from the expression when absent
    #[arg(short = 'd', long)]
    d: Option<usize>,
    /// Space the function acts on
    #[arg(long, value_enum)]
    space: Option<SpaceArg>,
    /// Domain guard: all, norm<B, or spec[lo,hi] with optional :k1;k2
    #[arg(long)]
    guard: Option<String>,
}

#[derive(Debug, Clone, clap::Args)]
struct PairOpts {
    /// Real part u in A1.., B1..
    #[arg(short = 'u', long)]
    u: String,
    /// Imaginary part v in A1.., B1..
    #[arg(short = 'v', long)]
    v: String,
    #[arg(short = 'd', long)]
    d: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Alg,
    Fd,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RouteArg {
    Fd,
    Alg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate an expression at a point
    Eval {
        #[command(flatten)]
        expr: ExprOpts,
        /// Point file (matrix, array of matrices, or {"A":..,"B":..})
        #[arg(long)]
        point: PathBuf,
    },
    /// Directional derivative at a point
    Derive {
        #[command(flatten)]
        expr: ExprOpts,
        #[arg(long)]
        point: PathBuf,
        /// Direction file, same shape as the point
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Comma-separated finite-difference steps, largest first
        #[arg(long)]
        steps: Option<String>,
    },
    /// Run a law or identity suite
    Check {
        #[command(subcommand)]
        which: CheckCommand,
    },
    /// Decide whether u + iv is an nc function
    Reconstruct {
        #[command(flatten)]
        pair: PairOpts,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Real and imaginary parts of a complex expression
    Decompose {
        #[command(flatten)]
        expr: ExprOpts,
        /// Hermitian pair point {"A":..,"B":..} to evaluate u and v at
        #[arg(long)]
        point: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// Gradedness, direct sums, unitary equivalence, similarity, intertwining
    Axioms {
        #[command(flatten)]
        expr: ExprOpts,
    },
    /// Cauchy-Riemann equations for (u, v), or for the parts of -e
    Cr {
        #[arg(short = 'u', long, requires = "v", conflicts_with = "expr")]
        u: Option<String>,
        #[arg(short = 'v', long, requires = "u")]
        v: Option<String>,
        #[arg(short = 'e', long = "expr")]
        expr: Option<String>,
        #[arg(short = 'd', long)]
        d: Option<usize>,
        /// alg takes Du, Dv from the block derivative of -e
        #[arg(long, value_enum, default_value = "fd")]
        route: RouteArg,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Frechet differentiability by remainder decay
    Fdiff {
        #[command(flatten)]
        expr: ExprOpts,
        #[arg(long)]
        steps: Option<String>,
    },
    /// Diagonal respect of the real and imaginary parts of -e
    Diag {
        #[command(flatten)]
        expr: ExprOpts,
        #[arg(long)]
        steps: Option<String>,
    },
}

fn run(cli: Cli) -> exit::CliResult<i32> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Eval { expr, point } => commands::eval(&cfg, &expr, &point),
        Command::Derive {
            expr,
            point,
            dir,
            method,
            steps,
        } => commands::derive(&cfg, &expr, &point, &dir, method, steps.as_deref()),
        Command::Check { which } => match which {
            CheckCommand::Axioms { expr } => commands::check_axioms(&cfg, &expr),
            CheckCommand::Cr {
                u,
                v,
                expr,
                d,
                route,
                steps,
            } => commands::check_cr(&cfg, u.zip(v), expr.as_deref(), d, route, steps.as_deref()),
            CheckCommand::Fdiff { expr, steps } => commands::check_fdiff(&cfg, &expr, steps.as_deref()),
            CheckCommand::Diag { expr, steps } => commands::check_diag(&cfg, &expr, steps.as_deref()),
        },
        Command::Reconstruct { pair, steps } => commands::reconstruct(&cfg, &pair, steps.as_deref()),
        Command::Decompose { expr, point } => commands::decompose(&cfg, &expr, point.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
