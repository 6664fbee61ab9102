use thiserror::Error;

use crate::analysis::{AnalysisError, ConfigError};
use crate::circuits::CircuitError;
use crate::physics::PhysicsError;
use crate::state::StateError;

/// Any failure surfaced by the command-line tool or the C interface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Physics(#[from] PhysicsError),

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Circuit(#[from] CircuitError),

    #[error(transparent)]
    Analysis(#[from] AnalysisError),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code: 1 config, 2 numerical invariant, 3 gate abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Physics(PhysicsError::NonFinite(_) | PhysicsError::Invalid { .. }) => 1,
            Error::Circuit(CircuitError::Aborted)
            | Error::State(StateError::ZeroTrace)
            | Error::Analysis(AnalysisError::Circuit(CircuitError::Aborted)) => 3,
            Error::Analysis(AnalysisError::Io { .. }) => 1,
            Error::Analysis(AnalysisError::InvalidSweep(_) | AnalysisError::InvalidRus(_)) => 1,
            Error::Circuit(CircuitError::UnknownVariant(_) | CircuitError::NotHybrid(_)) => 1,
            _ => 2,
        }
    }
}
