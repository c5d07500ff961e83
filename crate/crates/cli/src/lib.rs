//! Library side of the `nullfront` binary: argument grammar, subcommands and
//! the verification suite behind `nullfront selftest`.

// `!(a < b)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod output;
pub mod selftest;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

use crate::args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const GRAMMAR: &str =
    "usage: nullfront <subcommand> [--curve NAME | --spec FILE.json | --samples FILE.csv] \
[--sheet plus|minus] [--range A B] [--s-range A B] [--l-range A B] [--grid NS NL] [--tol X] \
[--tol-denom X] [--projection drop1|matrix FILE] [--format obj|csv|json] [--out PATH]";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] nullfront::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use nullfront::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Core(e) if e.is_numeric() => EXIT_NUMERIC,
            CliError::Core(
                E::Syntax { .. }
                | E::UnknownIdentifier { .. }
                | E::UnknownCatalogEntry(_)
                | E::InvalidInput(_)
                | E::OutOfInterval { .. },
            ) => EXIT_USAGE,
            CliError::Core(_) => EXIT_VALIDATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Caps the global rayon pool at `NULLFRONT_THREADS` when set.
fn configure_threads() {
    let Ok(raw) = std::env::var("NULLFRONT_THREADS") else {
        return;
    };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // fails only if the pool already exists, e.g. on a second run in-process
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        _ => {
            eprintln!("nullfront: ignoring NULLFRONT_THREADS={raw:?}; expected a positive integer")
        }
    }
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    match commands::dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("nullfront: {e}");
            let code = e.exit_code();
            if code == EXIT_USAGE {
                eprintln!("{GRAMMAR}");
            }
            code
        }
    }
}
