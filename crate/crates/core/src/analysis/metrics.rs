use num_complex::Complex64 as C64;

use crate::analysis::oracle::IdealOracle;
use crate::circuits::GateOutcome;
use crate::physics::ReflectionPair;
use crate::state::{fidelity, ProductInput, RegisterState, StateError};

/// Gate efficiency: ten block passes, `|(r1 - r0)/2|^10`.
pub fn eta_t(pair: &ReflectionPair) -> f64 {
    pair.success_amplitude().norm().powi(10)
}

/// Herald probability of one block pass, `|(r1 + r0)/2|^2`.
pub fn eta_d(pair: &ReflectionPair) -> f64 {
    pair.leak_amplitude().norm_sqr()
}

/// Fidelity between a conditional output and the ideal gate applied to the
/// same input.
pub fn conditional_fidelity(outcome: &GateOutcome, input: &ProductInput) -> Result<f64, StateError> {
    let (_, spins) = outcome.conditional_state.photonic_amplitudes()?;
    let ideal = IdealOracle::new(outcome.variant).apply(&input.photonic_amplitudes());
    let expected = RegisterState::from_photonic(&ideal, spins);
    fidelity(&outcome.conditional_state, &expected)
}

/// Largest elementwise distance between two states after removing their
/// relative global phase.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let overlap: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { C64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}

/// Largest pairwise phase-aligned distance between the photonic parts of a
/// set of branch outcomes.
pub fn branch_spread(outcomes: &[GateOutcome]) -> Result<f64, StateError> {
    let photonic: Vec<Vec<C64>> =
        outcomes.iter().map(|o| o.conditional_state.photonic_amplitudes().map(|(v, _)| v)).collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    for v in &photonic[1..] {
        worst = worst.max(phase_aligned_distance(&photonic[0], v));
    }
    Ok(worst)
}
