//! Scenario runner for the threshold-changeable sharing library.
//!
//! A [`Scenario`] names one of five flows and its parameters;
//! [`run_scenario`] executes it and returns a [`RunReport`], which
//! [`emit_report`] renders as text or JSON.

pub mod args;
pub mod report;
pub mod runner;
pub mod scenario;

use qtcss_core::classical::ClassicalError;
use qtcss_core::protocol::ProtocolError;
use thiserror::Error;

pub use report::{emit_report, Format, RunReport};
pub use runner::run_scenario;
pub use scenario::{Scenario, ScenarioKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("invalid scenario: {field}: {message}")]
    InvalidScenario { field: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

impl CliError {
    /// 2 for bad input, 1 for a failure while running.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::InvalidScenario { .. } | CliError::Io { .. } => 2,
            CliError::Classical(_) | CliError::Protocol(_) => 1,
        }
    }
}
