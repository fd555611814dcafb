//! Dynamic-regret online optimization by reduction to uniclass prediction.
//!
//! The library plays a repeated game against a drifting environment: each
//! round a convex cost is revealed, the learner pays its value at the played
//! action, and regret is measured against the per-round minima. Instead of
//! adapting to the cost type, the shipped learners chase the nearest
//! minimizer with projected gradient steps on a user-chosen uniclass loss;
//! the resulting per-round contraction turns the path length of the
//! minimizer sequence into a regret bound, whatever the costs are.
//!
//! Modules:
//! - [`geometry`]: points, feasible sets, exact projections
//! - [`costs`]: cost families and seeded scenario generation
//! - [`uniclass`]: uniclass losses and the modulus validator
//! - [`solver`]: inner projected-gradient minimization
//! - [`learners`]: the round-loop algorithms
//! - [`metrics`]: regret, regularity measures, bounds, audits
//! - [`config`] / [`harness`]: experiment configs, runs, sweeps, reports
//! - [`selftest`]: the named property battery behind `dynreg selftest`

pub mod config;
pub mod costs;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod learners;
pub mod metrics;
pub mod rng;
pub mod selftest;
pub mod solver;
pub mod trace_io;
pub mod uniclass;

pub use config::ExperimentConfig;
pub use costs::{CostFamily, CostFunction, Drift, Scenario, ScenarioSpec};
pub use error::{Error, Result};
pub use geometry::{FeasibleSet, Point};
pub use learners::{Learner, LearnerKind, RoundOutcome};
pub use metrics::{BoundReport, ExperimentTrace};
pub use uniclass::UniclassLoss;
