//! `gsd3`: generalized Schmidt decomposition of three-qubit states.
//!
//! Exit codes: 0 success, 1 I/O or solver failure, 2 malformed input,
//! 3 a check did not pass (see each subcommand).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod expr;

#[derive(Parser)]
#[command(name = "gsd3", version, about = "Generalized Schmidt decomposition of three-qubit pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
pub struct SolverArgs {
    /// Random restarts on top of the eight basis starts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Overlap increment at which a restart stops.
    #[arg(long, default_value_t = 1e-12, value_parser = expr::parse_number)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a state file and write a report.
    ///
    /// Exits 0 when the decomposition is valid, 3 when the state read in the
    /// computational basis is a canonical form but not the decomposition.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check coefficients against the necessary conditions. Exits 3 on failure.
    Verify {
        /// λ0 λ1 λ2 λ3 Re(λ4) Im(λ4); accepts forms like `2/3` or `sqrt(2)/3`.
        #[arg(long, num_args = 6, required = true, allow_hyphen_values = true, value_parser = expr::parse_number)]
        coeffs: Vec<f64>,
        /// Rescale the tuple to unit norm instead of rejecting it.
        #[arg(long)]
        renormalize: bool,
    },
    /// Analytic solutions for a|100> + b|010> + c|001>.
    Wfamily {
        #[arg(long, allow_hyphen_values = true, value_parser = expr::parse_number)]
        a: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = expr::parse_number)]
        b: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = expr::parse_number)]
        c: f64,
        #[arg(long)]
        renormalize: bool,
        /// |r| below this counts as a rule boundary.
        #[arg(long, default_value_t = gsd3::w_family::BOUNDARY_TOL, value_parser = expr::parse_number)]
        boundary_tol: f64,
    },
    /// Decompose an ensemble of seeded random states into a dataset.
    Scan {
        #[arg(long)]
        n: usize,
        /// First state seed; also seeds the solver.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Compare the solver with the grid oracle and reduced-density bounds.
    /// Exits 3 when they disagree.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 48)]
        n_theta: usize,
        #[arg(long, default_value_t = 48)]
        n_phi: usize,
        #[arg(long, default_value_t = 40)]
        refine_iters: usize,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Write a named state (ghz, w, psi_contr) as a state file.
    State {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() {
    if let Ok(v) = std::env::var("GSD3_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring GSD3_THREADS={v:?}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = match cli.command {
        Command::Decompose { input, out, solver, format } => commands::decompose(&input, out.as_deref(), &solver, format),
        Command::Verify { coeffs, renormalize } => commands::verify(&coeffs, renormalize),
        Command::Wfamily { a, b, c, renormalize, boundary_tol } => commands::wfamily(a, b, c, renormalize, boundary_tol),
        Command::Scan { n, seed, out, restarts } => commands::scan(n, seed, &out, restarts),
        Command::Oracle { input, n_theta, n_phi, refine_iters, solver } => {
            commands::oracle(&input, gsd3::oracle::GridSpec { n_theta, n_phi, refine_iters }, &solver)
        }
        Command::State { name, out } => commands::state(&name, out.as_deref()),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}
