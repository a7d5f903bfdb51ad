//! `ncsq` command-line front end.
//!
//! [`run`] parses an argument vector, executes one subcommand and returns the
//! process exit code: 0 on success, 1 when a check fails, 2 on usage or
//! parameter errors.

pub mod args;
pub mod commands;
pub mod output;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use ncsq_core::NcError;
use thiserror::Error;

use args::{Cli, Command};
use output::{emit, Emission};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Param(#[from] NcError),
    #[error("sweep grid has {0} points, more than the limit of 1e7")]
    GridTooLarge(f64),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Param(_) | CliError::GridTooLarge(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Json(_) => EXIT_FAILED_CHECK,
        }
    }
}

/// Worker count from `NCSQ_THREADS`, if set to a positive integer.
fn thread_cap() -> Option<usize> {
    std::env::var("NCSQ_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn execute(command: &Command) -> Result<(Emission, Option<&args::OutputArgs>), CliError> {
    Ok(match command {
        Command::Params(c) => (commands::params(c)?, Some(&c.output)),
        Command::Variance(c) => (commands::variance(c)?, Some(&c.output)),
        Command::Overlap(c) => (commands::overlap(c)?, Some(&c.output)),
        Command::Bogoliubov(c) => (commands::bogoliubov(c)?, Some(&c.output)),
        Command::Check(c) => (commands::check(c)?, Some(&c.output)),
        Command::Overcompleteness(c) => (commands::overcompleteness(c)?, Some(&c.output)),
        Command::Sweep(c) => (commands::sweep_cmd(c)?, Some(&c.output)),
        Command::Oscillator(c) => (commands::oscillator(c)?, Some(&c.output)),
    })
}

fn first_line(text: &str) -> &str {
    text.lines().find(|l| !l.trim().is_empty()).unwrap_or(text).trim()
}

/// Runs `ncsq` with `argv` (program name first), writing results to
/// `stdout` and diagnostics to `stderr`.
pub fn run_with<I, T>(argv: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(stderr, "ncsq: {}", first_line(&e.to_string()).trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    let work = || execute(&cli.command);
    let computed = match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(CliError::Usage(format!("cannot start {n} workers: {e}"))),
        },
        None => work(),
    };
    let result = computed.and_then(|(emission, out)| {
        for note in &emission.notes {
            let _ = writeln!(stderr, "ncsq: {note}");
        }
        let (path, json) = out.map_or((None, false), |o| (o.out.as_deref(), o.json));
        emit(&emission, path, json, stdout)?;
        Ok(if emission.failed { EXIT_FAILED_CHECK } else { EXIT_OK })
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "ncsq: {e}");
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
