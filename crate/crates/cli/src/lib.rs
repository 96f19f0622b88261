//! Scenario runner behind the `levy-bounds` command.
//!
//! A scenario file names two processes (or a sweep over one family), a set
//! of theorem tags and a Monte Carlo budget. [`runner::run`] evaluates every
//! bound, estimates the matching distance by simulation and writes one
//! certification row per (point, theorem).

pub mod plot;
pub mod report;
pub mod runner;
pub mod scenario;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}: {msg}")]
    Schema { file: String, msg: String },
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] levy_bounds::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub use report::Report;
pub use runner::run;
pub use scenario::Scenario;
