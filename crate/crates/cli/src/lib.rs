//! Library surface of the `asls` experiment runner: config parsing, problem
//! materialization, run execution, metrics/plot serialization, and trajectory
//! verification. The binary in main.rs is a thin argument-parsing shell.

pub mod config;
pub mod metrics;
pub mod plot;
pub mod runner;
pub mod verify;

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments: exit 2.
    Usage(String),
    /// Run abort or invariant violation: exit 1.
    Failure(String),
}

impl CliError {
    pub fn from_core(e: asls_core::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Failure(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}
