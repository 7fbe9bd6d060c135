//! Command-line front end: configuration documents, analyses, sweeps and
//! reports.

pub mod analysis;
pub mod caps;
pub mod cli;
pub mod document;
pub mod error;
pub mod experiment;
pub mod provenance;
pub mod report;
pub mod sweep;

use std::ffi::OsString;

use clap::Parser;

pub use error::{CliError, CliResult, EXIT_ASSERTION, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE};

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let parsed = match cli::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = caps::limits_from_env().and_then(|limits| cli::dispatch(parsed, &limits));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("joints: {e}");
            e.exit_code()
        }
    }
}
