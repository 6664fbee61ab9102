//! Oracle, efficiency metrics, parameter sweeps, repeat-until-success
//! estimation and scenario files.

pub mod config;
pub mod metrics;
pub mod oracle;
pub mod rus;
pub mod sweep;

use std::path::PathBuf;

use thiserror::Error;

use crate::circuits::CircuitError;
use crate::physics::PhysicsError;
use crate::state::StateError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error(transparent)]
    Physics(#[from] PhysicsError),

    #[error(transparent)]
    State(#[from] StateError),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("invalid repeat-until-success request: {0}")]
    InvalidRus(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub use config::{ConfigError, ScenarioConfig};
pub use metrics::{conditional_fidelity, eta_d, eta_t};
pub use oracle::{ideal_apply, IdealOracle};
pub use rus::{repeat_until_success, GateChannel, RoundResult, RusChannel, RusEstimate, StubChannel};
pub use sweep::{run_sweep, write_csv, SweepRow, SweepSpec};
