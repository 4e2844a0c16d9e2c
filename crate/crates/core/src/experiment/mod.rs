//! Reproducible experiments over the benchmark functions: configuration,
//! seeded replicates, sweeps, race calibration, landscape analysis and the
//! output files they produce.

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

use crate::engine::EngineError;
use crate::functions::FunctionError;
use crate::paths::PathError;
use crate::stategraph::GraphError;

pub use commands::{execute, CommandOutput, Status, COMMANDS};
pub use config::{Instance, Spec};
pub use output::{Format, OutputFile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ExperimentError {
    /// 1 for usage and configuration problems, 2 for infeasible calibration,
    /// 3 for internal invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Infeasible(_) => 2,
            ExperimentError::Engine(EngineError::InvariantViolation(_)) => 3,
            _ => 1,
        }
    }
}
