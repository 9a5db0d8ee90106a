//! Config-driven sweeps over scheme grids and the built-in validation suite.

pub mod config;
pub mod grid;
pub mod validation;

pub use config::{ExperimentConfig, LearnerConfig, OUTPUT_DIR_ENV};
pub use grid::{prepare_data, run_experiment, CellOutcome, ExperimentGrid, ExperimentOutput, RunResult};
pub use validation::{run_validation_suite, CheckResult, CheckStatus, ValidationOptions, ValidationReport};
