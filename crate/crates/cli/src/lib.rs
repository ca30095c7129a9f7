//! Command-line front end for the `expectile-el` estimators.
//!
//! Every command returns a JSON report (carrying `schema_version`); commands
//! given `--out <dir>` also write their report and CSV tables there.

pub mod args;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;

use std::ffi::OsString;

use clap::Parser;

pub use commands::Outcome;
pub use error::CliError;

use args::{Cli, Command};

/// Parses `argv` (including the program name), expands `--config`, and runs
/// the selected command.
pub fn run<I, T>(argv: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv = config::expand_config(argv.into_iter().map(Into::into).collect())?;
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;
    match &cli.command {
        Command::Fit(a) => commands::cmd_fit(a),
        Command::Select(a) => commands::cmd_select(a),
        Command::Sweep(a) => commands::cmd_sweep(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Tau(a) => commands::cmd_tau(a),
    }
}
