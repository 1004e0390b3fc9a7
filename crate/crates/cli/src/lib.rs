//! Command-line front end for `bellgen-core`.
//!
//! Every subcommand produces a [`Report`]: a metadata header (command, kind,
//! seed, trial count, version), a table of rows, and a list of checks. The
//! process exits 0 only when every check passes.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use anyhow::{Context, Result};
use clap::Parser;

pub use config::{Cli, CommandKind, RunConfig, UsageError};
pub use output::{Cell, Check, Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Runs the configured command, inside a dedicated thread pool when `threads` is set.
pub fn run_config(cfg: &RunConfig) -> Result<Report> {
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")?
            .install(|| commands::run(cfg)),
        None => commands::run(cfg),
    }
}

fn write_outputs(cfg: &RunConfig, report: &Report) -> Result<()> {
    let machine = report.emit(cfg.format)?;
    let human = report.render_text();
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, machine).with_context(|| format!("writing {}", path.display()))?;
            print!("{human}");
        }
        None => {
            std::io::stdout().write_all(machine.as_bytes())?;
            eprint!("{human}");
        }
    }
    Ok(())
}

/// Parses arguments, runs, writes output, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
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
    let cfg = match RunConfig::from_cli(cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = run_config(&cfg).and_then(|report| {
        write_outputs(&cfg, &report)?;
        Ok(report.all_passed())
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}
