//! Command-line front end for `quintiq`.
//!
//! Exit codes: 0 success, 1 expression parse error, 2 domain error while
//! evaluating the integrand, 3 budget exceeded or tolerance below what the
//! precision can resolve, 64 usage error.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

pub use commands::{
    run_check, run_experiment1, run_experiment2, run_integrate, CheckReport, ExperimentRow, ExperimentTable,
    IntegrateReport, SKIPPED_MARKER,
};
pub use config::{Cli, Command, CommandKind, MethodArg, OutputFormat, Precision, RunConfig, StrategyArg};
pub use error::CliError;

fn execute<W: Write + ?Sized, E: Write + ?Sized>(cli: &Cli, out: &mut W, err: &mut E) -> Result<(), CliError> {
    let config = RunConfig::from_command(&cli.command)?;
    match config.command {
        CommandKind::Integrate => {
            let report = run_integrate(&config)?;
            if let Some(c) = &report.convexity {
                if c.verdict == quintiq::Verdict::Violated {
                    writeln!(err, "warning: sampled divided differences change sign; the error bound does not apply")?;
                }
            }
            render::integrate(out, &report, config.output)
        }
        CommandKind::Check => render::check(out, &run_check(&config)?, config.output),
        CommandKind::Experiment1 => {
            render::experiment(out, &run_experiment1(config.precision, config.strategy, config.n_max)?, config.output)
        }
        CommandKind::Experiment2 => {
            render::experiment(out, &run_experiment2(config.precision, config.strategy, config.n_max)?, config.output)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write + ?Sized,
    E: Write + ?Sized,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    error::EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
