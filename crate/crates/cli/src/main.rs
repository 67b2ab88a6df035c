//! `torsio`: command-line driver for torsio-core.
//!
//! Exit codes: 0 success, 1 I/O, 2 unparsable input, 3 geometry or gluing
//! failure, 4 a measured quantity outside its tolerance.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;
use torsio_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
  #[error("{0}")]
  Io(String),
  #[error("parse error: {0}")]
  Parse(String),
  #[error("geometry error: {0}")]
  Geometry(String),
  #[error("tolerance exceeded: {0}")]
  Tolerance(String),
}

impl CliError {
  fn code(&self) -> u8 {
    match self {
      CliError::Io(_) => 1,
      CliError::Parse(_) => 2,
      CliError::Geometry(_) => 3,
      CliError::Tolerance(_) => 4,
    }
  }
}

impl From<CoreError> for CliError {
  fn from(e: CoreError) -> Self {
    match e {
      CoreError::Degenerate(_)
      | CoreError::NonManifold(_)
      | CoreError::NonOrientable(_)
      | CoreError::InvalidInput(_)
      | CoreError::UnknownName(_) => CliError::Parse(e.to_string()),
      _ => CliError::Geometry(e.to_string()),
    }
  }
}

fn main() -> ExitCode {
  let cli = args::Cli::parse();
  match commands::run(cli.command) {
    Ok(()) => ExitCode::SUCCESS,
    Err(e) => {
      eprintln!("torsio: {e}");
      ExitCode::from(e.code())
    }
  }
}
