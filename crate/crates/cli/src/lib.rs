//! Command-line harness for `flexqr`: single fits, tau grids with count
//! curves and event tables, and the synthetic benchmark.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;
pub mod output;

use clap::Parser;

pub use args::Cli;
pub use error::{CliError, CliResult};

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        args::Command::Fit(a) => commands::cmd_fit(a, argv),
        args::Command::Grid(a) => commands::cmd_grid(a, argv),
        args::Command::Bench(a) => commands::cmd_bench(a, argv),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
