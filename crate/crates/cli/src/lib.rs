//! Command-line front end for the `charvol` estimators.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod output;

use args::{Cli, Command};
use error::CliResult;

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => commands::cmd_simulate(&cli.common, a).map(|_| ()),
        Command::Estimate(a) => commands::cmd_estimate(&cli.common, a),
        Command::Montecarlo(a) => commands::cmd_montecarlo(&cli.common, a),
        Command::Theory(a) => commands::cmd_theory(&cli.common, a),
    }
}
