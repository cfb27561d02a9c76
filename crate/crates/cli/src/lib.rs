//! Front end of the `lis-hwi` binary. Every subcommand builds a [`Table`]
//! which is rendered as CSV or JSON; [`run`] maps failures to exit codes
//! (1 for bad arguments, 2 for numerical failures).

pub mod args;
pub mod commands;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command};
pub use commands::{sweep_points, Outcome};
pub use output::{format_number, Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] lis_hwi::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use lis_hwi::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Model(
                E::InvalidParameter { .. } | E::OffAxisUser { .. } | E::UndefinedSnrLoss,
            ) => EXIT_USAGE,
            CliError::Model(_) => EXIT_NUMERICAL,
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Zeta(a) => commands::zeta(a),
        Command::Noise(a) => commands::noise(a),
        Command::CapacitySweep(a) => commands::capacity_sweep(a),
        Command::UtilitySweep(a) => commands::utility_sweep(a),
        Command::SnrLossSweep(a) => commands::snr_loss_sweep(a),
        Command::TurningPoint(a) => commands::turning(a),
        Command::Split(a) => commands::split(a),
        Command::ValidateMc(a) => commands::validate_mc(a),
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// output. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|outcome| emit(&cli, outcome)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, outcome: Outcome) -> Result<i32, CliError> {
    let common = cli.command.common();
    let text = outcome.table.render(common.format);
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if outcome.code == EXIT_NUMERICAL {
        eprintln!("error: result outside tolerance or not converged");
    }
    Ok(outcome.code)
}
