//! Characteristic-function estimators of integrated volatility for
//! semimartingales with infinite-variation jumps, with baselines, bias theory,
//! a stochastic-volatility simulator and a Monte Carlo harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod grid;
pub mod montecarlo;
pub mod simulation;
pub mod theory;

pub use error::{Error, Result};
pub use estimators::{EstimatorKind, Flags, IVEstimate, Method};
pub use grid::{block_partition, BlockIndex, EstimatorConfig, Kappa, SampledPath};
pub use montecarlo::{run_study, McSummary, StudyConfig, StudyResult, StudyScenario, Tuning};
pub use simulation::{SimOutput, SimScenario};
