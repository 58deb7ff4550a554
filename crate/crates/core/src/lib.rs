//! Swarm-based gradient descent.
//!
//! A swarm of agents, each carrying a position and a mass, explores a
//! non-convex landscape. Agents above the current minimizer shed mass to it in
//! proportion to their relative height, and every agent takes a backtracking
//! gradient step whose sufficient-decrease demand scales with its relative
//! mass. Heavy agents descend carefully near good minima while light agents
//! take long exploratory steps.
//!
//! ```
//! use swarm_descent::{run_sbgd, Objective, SbgdParams};
//!
//! let obj = Objective::flat_basin();
//! let starts: Vec<Vec<f64>> = (0..30).map(|i| vec![-3.0 + 2.0 * i as f64 / 29.0]).collect();
//! let params = SbgdParams { p: 2.0, ..SbgdParams::default() };
//! let result = run_sbgd(&obj, &starts, &params).unwrap();
//! assert!((result.x_sol[0] - obj.minimizer()[0]).abs() < 0.25);
//! ```

pub mod baselines;
pub mod config;
pub mod error;
pub mod harness;
pub mod linesearch;
pub mod objectives;
pub mod output;
pub mod presets;
pub mod swarm;

pub use baselines::{run_baseline, run_single_agent, AgentRun, BaselineMethod, BaselineParams};
pub use config::{ConfigFile, MethodName};
pub use error::{Error, Result};
pub use harness::{
    precondition_and_correct, run_experiment, run_one, Correction, CorrectionParams, ExperimentConfig,
    ExperimentReport, Method, RunRecord,
};
pub use linesearch::{backtrack, Backtrack, BacktrackParams};
pub use objectives::{Objective, ObjectiveKind};
pub use swarm::{run_sbgd, run_sbgd_observed, IterationReport, RunResult, SbgdParams, StopReason, Swarm};
