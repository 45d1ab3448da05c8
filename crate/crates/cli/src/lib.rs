//! Implementation of the `qent` command line.

pub mod args;
mod commands;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{basis_json, measure_report_json, ExitStatus};

/// Runs the CLI with explicit arguments and seed override, writing the
/// primary output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, seed_override: Option<u64>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match commands::execute(cli.command, seed_override, out) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

/// `QENT_SEED` as a seed, if set and valid.
pub fn env_seed() -> Result<Option<u64>, String> {
    match std::env::var("QENT_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("QENT_SEED must be an unsigned integer, got {s:?}")),
        Err(_) => Ok(None),
    }
}
