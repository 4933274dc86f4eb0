//! File formats and the `tabsyn` command-line front end.
//!
//! Tables travel as CSV next to a JSON schema file, fitted models as
//! versioned JSON bundles, and reports as JSON, fixed-width text or CSV.

pub mod bundle;
mod commands;
pub mod csv_io;
pub mod files;
pub mod report;

use std::ffi::OsString;

pub use commands::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Diverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Diverged(_) => 3,
        }
    }
}

impl From<tabsyn_core::Error> for CliError {
    fn from(e: tabsyn_core::Error) -> Self {
        match e {
            tabsyn_core::Error::TrainingDiverged { .. } => CliError::Diverged(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr as a single line.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}
