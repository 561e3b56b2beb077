//! Experiment driver: configuration, Monte Carlo simulation, streaming and
//! report output.

pub mod config;
pub mod report;
pub mod simulate;
pub mod stream;

pub use config::{DataSpec, ExperimentConfig, Method, NullSpec};
pub use simulate::{lower_bound_j, predict_tau, run_simulation, validate_type1, SimulationReport};
pub use stream::{run_stream, OnError};
