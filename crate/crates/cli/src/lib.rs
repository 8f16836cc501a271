//! The `lozenge` command-line tool.

pub mod args;
pub mod compare;
pub mod render;
pub mod sample;
pub mod tables;
pub mod verify;

use std::fs;
use std::path::Path;

use lozenge_core::error::Error as CoreError;
use lozenge_core::tilings::{BeadArray, SawtoothSpec};
use serde_json::Value;
use thiserror::Error;

pub use args::Cli;
use args::Command;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Argument(_) => CliError::Usage(e.to_string()),
            CoreError::Budget(_) => CliError::Budget(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Result of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Nothing failed but some comparisons were skipped for budget reasons.
    Skipped,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Skipped => 3,
        }
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Sample(a) => sample::run(&a),
        Command::Render(a) => render::run(&a),
        Command::Verify(a) => verify::run(&a),
        Command::GueCompare(a) => compare::run(&a),
        Command::Hurwitz(a) => tables::run_hurwitz(&a),
        Command::Coeffs(a) => tables::run_coeffs(&a),
    }
}

pub fn read_spec(path: &Path) -> CliResult<SawtoothSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read spec {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed spec {}: {e}", path.display())))
}

pub fn read_pattern(path: &Path) -> CliResult<BeadArray> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read pattern {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed pattern {}: {e}", path.display())))
}

/// Writes `bytes` to `out`, or to stdout when no path is given.
pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

pub fn write_json(out: Option<&Path>, doc: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("JSON values serialize");
    text.push('\n');
    write_output(out, text.as_bytes())
}
