//! Command-line harness around the `driftgame` library: single games, bound
//! tables, convergence sweeps, the exact small-instance oracle, and the
//! numeric self-checks.

pub mod cli;
pub mod commands;
pub mod csv;
pub mod run;
pub mod settings;
pub mod sweep;

use std::error::Error;
use std::fmt;

/// Top-level failure modes, each mapped to a distinct process exit code so
/// scripts can tell "you asked for something invalid" from "the run itself
/// failed" from "the adversary gave up".
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or game parameters (exit 2).
    Config(String),
    /// A run, audit, check, or sweep verdict failed (exit 1).
    Failure(String),
    /// A sampling adversary exhausted its redraw budget (exit 3).
    Abort(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failure(_) => 1,
            CliError::Abort(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Failure(msg) => write!(f, "{msg}"),
            CliError::Abort(msg) => write!(f, "{msg}"),
        }
    }
}

impl Error for CliError {}

pub fn dispatch(cli: cli::Cli) -> Result<(), CliError> {
    match &cli.command {
        cli::Cmd::Simulate(args) => commands::cmd_simulate(args),
        cli::Cmd::Bounds(args) => commands::cmd_bounds(args),
        cli::Cmd::Sweep(args) => commands::cmd_sweep(args),
        cli::Cmd::Oracle(args) => commands::cmd_oracle(args),
        cli::Cmd::Check(args) => commands::cmd_check(args),
    }
}
