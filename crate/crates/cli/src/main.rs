//! `hpme`: coefficients, evaluations, separable PDE solutions and the
//! verification suite from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 contract violation, 4 numeric failure.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod output;
mod params;

use commands::{CoeffsCmd, EigenfunCmd, GuardCmd, PdeCmd, TemporalCmd, VerifyCmd};

#[derive(Debug, Parser)]
#[command(name = "hpme", version, about = "Power-series eigenfunctions of the nonlinear hyperbolic operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Taylor coefficients of an eigenfunction with their residual and radius estimate
    Coeffs(CoeffsCmd),
    /// Run the verification suite; exits 3 if any check fails
    Verify(VerifyCmd),
    /// Evaluate an eigenfunction on an eta grid (center defaults to 2)
    Eigenfun(EigenfunCmd),
    /// Separable solution u = f(t) Q(eta) with its residual report (center defaults to 2)
    Pde(PdeCmd),
    /// Degree and leading-coefficient laws on random polynomials
    Guard(GuardCmd),
    /// Closed-form temporal factor on a time grid
    Temporal(TemporalCmd),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Coeffs(c) => commands::coeffs(c),
        Command::Verify(c) => commands::verify(c),
        Command::Eigenfun(c) => commands::eigenfun(c),
        Command::Pde(c) => commands::pde(c),
        Command::Guard(c) => commands::guard(c),
        Command::Temporal(c) => commands::temporal(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
