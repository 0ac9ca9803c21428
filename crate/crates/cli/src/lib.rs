//! Command-line front end: `generate`, `audit`, `sweep`, `correlate` and
//! `match`.
//!
//! Exit codes: 0 success, 2 input error, 3 parameter error, 4 alignment
//! error, 5 no match.

pub mod args;
pub mod commands;
pub mod data;
pub mod error;
pub mod params;
pub mod report;

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use commands::Ctx;
use error::CliError;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { CliError::param("").exit_code() } else { 0 };
        }
    };
    let started = Instant::now();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return CliError::param("").exit_code();
        }
    };
    let ctx = Ctx {
        threads: pool.current_num_threads(),
        started,
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Generate(a) => commands::generate(a, &ctx),
        Command::Audit(a) => commands::audit(a, &ctx),
        Command::Sweep(a) => commands::sweep_cmd(a, &ctx),
        Command::Correlate(a) => commands::correlate(a, &ctx),
        Command::Match(a) => commands::match_cmd(a, &ctx),
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
