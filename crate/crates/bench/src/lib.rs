//! Experiment harness for modulo-ADC recovery: configuration, seeded trial
//! ensembles, CSV results and aggregates.

pub mod config;
pub mod experiments;
pub mod fingerprint;
pub mod results;
pub mod seeds;

use std::fmt;

pub use config::{Algorithm, ExperimentConfig, ExperimentKind};
pub use experiments::{bound_table_csv, run_experiment};
pub use results::{read_csv, summarize, write_csv, CellSummary, ResultRow};

/// Invalid configuration or command-line input (exit code 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Failure while running an experiment or doing I/O (exit code 3).
#[derive(Debug)]
pub struct RunError(pub String);

impl RunError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "runtime error: {}", self.0)
    }
}

impl std::error::Error for RunError {}

impl From<modrec_core::Error> for RunError {
    fn from(e: modrec_core::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self(e.to_string())
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        Self(e.to_string())
    }
}
