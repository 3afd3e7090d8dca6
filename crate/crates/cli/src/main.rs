//! `hankel`: batch front end for transforms, convolutions, resolvents,
//! fractional powers, special functions and the verification suite.
//!
//! Exit status: 0 success, 1 verification failure, 2 configuration or input
//! error, 3 quadrature failure.

mod config;
mod csv;
mod error;
mod job;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, JobConfig, Overrides};
use error::CliError;
use job::Job;

#[derive(Debug, Parser)]
#[command(name = "hankel", version, about = "Hankel transforms and Bessel operator calculus on the half line")]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// h_μ f on the output grid.
    Transform,
    /// f ♯ g of two inputs.
    Convolve,
    /// (λ - S_μ)^{-1} f.
    Resolvent,
    /// (-S_μ)^α f, or (-Δ_μ)^α f with --route delta.
    Fracpow,
    /// J_ν, Macdonald K_ν or Γ on the grid.
    Specfun,
    /// Runs the identity suite and writes a JSON report.
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Transform => Command::Transform,
            Cmd::Convolve => Command::Convolve,
            Cmd::Resolvent => Command::Resolvent,
            Cmd::Fracpow => Command::Fracpow,
            Cmd::Specfun => Command::Specfun,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.flags.config {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    let command = match (cli.command, file.command) {
        (Some(c), _) => c.into(),
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::Config("no command given on the command line or in the config".into())),
    };
    Job::resolve(command, cli.flags.apply(file))?.run()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hankel: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
