//! Anytime-valid sequential tests against composite nulls.
//!
//! Two families of e-processes are provided: universal inference over the
//! convex hull of finitely many pmfs ([`ui`]) and Donsker-Varadhan processes
//! built from a predictable empirical risk maximizer ([`dv`]). The
//! [`harness`] module drives Monte Carlo experiments and streaming runs.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod class;
pub mod dv;
pub mod eprocess;
pub mod error;
pub mod fixed_point;
pub mod harness;
pub mod null;
pub mod optim;
pub mod prob;
pub mod saddle;
pub mod ui;

pub use class::{BetClass, LogRatioClass, Observation, TestFunction};
pub use dv::{CorrectedEProcess, DvClass, DvEProcess, EtaSchedule, MixtureEProcess};
pub use eprocess::{first_crossing, log_threshold, EProcess};
pub use error::{Error, Result};
pub use fixed_point::{solve_largest_root, FixedPointQuery};
pub use null::{BoundedMeanNull, ConvexHullNull, KlInfResult, NullModel};
pub use prob::{kl_divergence, Pmf, SeededStream};
pub use saddle::{SaddleProblem, SaddleSolution, SolverConfig};
pub use ui::{KtState, UiEProcess};
