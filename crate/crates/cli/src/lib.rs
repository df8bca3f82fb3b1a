//! Experiment harness for the swarm optimizer: TOML configs, seeded
//! replicates, parameter sweeps and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{ExperimentConfig, LipschitzSource, SweepSpec};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, run_sweep, ExperimentOutcome, SweepReport, SweepRow};
pub use output::{emit_trajectory_csv, read_trajectory};
