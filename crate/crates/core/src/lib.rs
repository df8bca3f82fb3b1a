//! Swarm-based gradient descent (SBGD) for non-convex global optimization.
//!
//! A swarm of agents, each carrying a position and a share of a unit mass,
//! descends an objective by backtracking gradient steps. Every iteration the
//! agents hand mass to the current minimizer in proportion to their relative
//! height, and each agent's step is scaled by its relative mass: heavy agents
//! refine near the best point found so far, light agents take long
//! exploratory steps.
//!
//! ```
//! use sbgd_core::{objective::paper_objective, run_basic, InitScheme, SbgdParams};
//!
//! let f = paper_objective();
//! let params = SbgdParams {
//!     agents: 20,
//!     lipschitz: 5.0,
//!     init: InitScheme::LeftCluster,
//!     ..SbgdParams::default()
//! };
//! let result = run_basic(&params, &f).unwrap();
//! assert!((result.solution[0] - 1.5355).abs() < 1e-3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod communication;
pub mod diagnostics;
pub mod error;
pub mod linesearch;
pub mod mass;
pub mod objective;
pub mod oracle;
pub mod params;
pub mod sbgd;
pub mod swarm;
pub mod trajectory;

pub use communication::{Extremes, HeightProfile};
pub use error::{Result, SbgdError};
pub use linesearch::LineSearchOutcome;
pub use objective::{BoxDomain, Objective};
pub use oracle::{grid_oracle, OracleResult};
pub use params::{InitScheme, SbgdParams, Variant};
pub use sbgd::{
    init_swarm, run, run_baseline, run_basic, run_observed, run_tolerance, step, AcceptedStep,
    RunResult, StepObserver, StepReport, Termination,
};
pub use swarm::{Agent, Swarm};
pub use trajectory::{AgentSnapshot, TrajectoryRecord};
