//! `finsler`: builds fields from JSON configuration, runs computations and
//! checks, and writes machine-readable reports.
//!
//! Exit codes: 0 pass, 1 check failure (or inconclusive), 2 usage or
//! configuration error, 3 numerical non-convergence.

pub mod args;
mod commands;
pub mod emit;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;
use finsler_core::FinslerError;
use serde_json::json;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// Error raised by a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<FinslerError> for Failure {
    fn from(e: FinslerError) -> Self {
        Self {
            code: if e.is_non_convergence() { EXIT_NONCONVERGENCE } else { EXIT_USAGE },
            message: e.to_string(),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return EXIT_PASS;
        }
        Err(e) => {
            emit::diag("error", "usage", json!({"code": EXIT_USAGE, "message": e.to_string().trim()}));
            return EXIT_USAGE;
        }
    };
    // rayon reads 0 as "all cores"
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs).build() {
        Ok(p) => p,
        Err(e) => {
            emit::diag("error", "usage", json!({"code": EXIT_USAGE, "message": e.to_string()}));
            return EXIT_USAGE;
        }
    };
    match pool.install(|| commands::dispatch(&cli)) {
        Ok(code) => code,
        Err(f) => {
            emit::diag("error", "failure", json!({"code": f.code, "message": f.message}));
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes() {
        let nc = FinslerError::NonConvergence {
            solver: "newton".into(),
            iterations: 10,
            residual: 1.0,
            history: vec![],
        };
        assert_eq!(Failure::from(nc).code, EXIT_NONCONVERGENCE);
        assert_eq!(Failure::from(FinslerError::Config("x".into())).code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["finsler", "--help"]), EXIT_PASS);
        assert_eq!(run(["finsler", "check"]), EXIT_USAGE);
    }
}
