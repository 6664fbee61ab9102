//! Simulator for an error-detected hyperparallel Toffoli gate acting on the
//! polarization and spatial qubits of three photons, mediated by four
//! cavity-coupled NV-center spins.
//!
//! * [`physics`]: cavity reflection amplitudes and the spin-selective
//!   scattering rule.
//! * [`state`]: the dense register and its lossy, heralded channels.
//! * [`elements`]: optical elements and the two error-detecting blocks.
//! * [`circuits`]: gate programs, spin measurement and feed-forward.
//! * [`analysis`]: oracle, efficiencies, sweeps, repeat-until-success and
//!   scenario files.

pub mod analysis;
pub mod circuits;
pub mod elements;
pub mod error;
pub mod physics;
pub mod state;

pub use error::Error;
