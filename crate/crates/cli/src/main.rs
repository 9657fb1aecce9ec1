//! `fdk`: exact-arithmetic pipelines for linear free divisors.
//!
//! Exit codes: 0 success, 1 a mathematical check failed, 2 usage or parse
//! error, 3 computation budget exceeded.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdk_core::Error;

#[derive(Parser)]
#[command(name = "fdk", version, about = "exact computer algebra for linear free divisors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Divisor JSON file, or `catalog:<id>` (see `fdk catalog`).
    input: String,
    /// Twist parameter beta0, as rational text (default: the largest
    /// admissible integer).
    #[arg(long, allow_hyphen_values = true)]
    beta0: Option<String>,
    /// Base-point value h(p), as rational text (default: from the input
    /// file, else 1).
    #[arg(long, allow_hyphen_values = true)]
    hp: Option<String>,
    /// Deformation constant c (default: h(p)).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// Deformation exponent d (default: n).
    #[arg(long)]
    d: Option<i64>,
    /// Mode selector; for `sk`: order | total | both.
    #[arg(long)]
    mode: Option<String>,
    /// Run Gröbner computations over the prime field F_p instead of Q.
    #[arg(long, value_name = "P")]
    modular: Option<u64>,
    /// Re-derive catalog constants and compare them with the stored values.
    #[arg(long)]
    verify: bool,
    /// Write the JSON report to this file (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Saito criterion and the Lie algebras g_D / a_D.
    CheckFree(Common),
    /// Strongly-Koszul regular-sequence certification.
    Sk(Common),
    /// Bernstein-Sato polynomial in both normalizations with the symmetry
    /// verdict.
    Bfunction(Common),
    /// Resonance constant and admissibility table.
    Resonance(Common),
    /// Tautological presentations (w-side and Fourier-Laplace image).
    Taut(Common),
    /// Spencer complex build, d^2 = 0 and graded-Koszul comparison.
    Spencer(Common),
    /// Dimensional reduction through the quantum differential equation.
    Reduce(Common),
    /// List catalog entries or show one (`fdk catalog [<id>]`).
    Catalog {
        id: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Parse { .. }
        | Error::UnknownVariable(_)
        | Error::BadInput(_)
        | Error::UnknownCatalogId(_)
        | Error::NonSquareMatrix { .. } => ExitCode::from(2),
        Error::BudgetExceeded => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::CheckFree(c) => commands::run("check-free", c, commands::check_free),
        Command::Sk(c) => commands::run("sk", c, commands::sk),
        Command::Bfunction(c) => commands::run("bfunction", c, commands::bfunction),
        Command::Resonance(c) => commands::run("resonance", c, commands::resonance),
        Command::Taut(c) => commands::run("taut", c, commands::taut),
        Command::Spencer(c) => commands::run("spencer", c, commands::spencer),
        Command::Reduce(c) => commands::run("reduce", c, commands::reduce),
        Command::Catalog { id, out } => commands::catalog(id.as_deref(), out.as_deref()),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("fdk: error: {err}");
            exit_code_for(&err)
        }
    }
}
