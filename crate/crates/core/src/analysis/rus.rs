//! Monte-Carlo estimate of the success probability when a heralded failure
//! triggers a fresh attempt.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::AnalysisError;
use crate::circuits::GateProgram;
use crate::state::{ProductInput, RegisterState};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundResult {
    Success,
    /// A detector fired.
    Heralded,
    /// The photon was lost without a click.
    Lost,
}

/// One attempt of a probabilistic gate.
pub trait RusChannel: Sync {
    fn sample_round(&self, rng: &mut ChaCha8Rng) -> RoundResult;

    /// Exact single-attempt success probability.
    fn success_probability(&self) -> f64;
}

/// Succeeds with a fixed probability and heralds otherwise.
#[derive(Clone, Copy, Debug)]
pub struct StubChannel {
    pub p_success: f64,
}

impl RusChannel for StubChannel {
    fn sample_round(&self, rng: &mut ChaCha8Rng) -> RoundResult {
        if rng.gen::<f64>() < self.p_success {
            RoundResult::Success
        } else {
            RoundResult::Heralded
        }
    }

    fn success_probability(&self) -> f64 {
        self.p_success
    }
}

/// Outcome probabilities of one simulated gate attempt.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateChannel {
    pub p_success: f64,
    pub p_herald: f64,
    pub p_loss: f64,
}

impl GateChannel {
    /// Simulates the gate once to obtain its round probabilities. The spin
    /// measurements leave the trace unchanged, so they are skipped.
    pub fn simulate(program: &GateProgram, input: &ProductInput) -> Result<Self, AnalysisError> {
        let state = RegisterState::init_product(input, program.spin_init)?;
        let state = program.run_unmeasured(state)?;
        Ok(Self { p_success: state.trace(), p_herald: state.heralded_mass(), p_loss: state.loss() })
    }
}

impl RusChannel for GateChannel {
    fn sample_round(&self, rng: &mut ChaCha8Rng) -> RoundResult {
        let u = rng.gen::<f64>() * (self.p_success + self.p_herald + self.p_loss);
        if u < self.p_success {
            RoundResult::Success
        } else if u < self.p_success + self.p_herald {
            RoundResult::Heralded
        } else {
            RoundResult::Lost
        }
    }

    fn success_probability(&self) -> f64 {
        self.p_success
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RusEstimate {
    pub trials: u64,
    pub max_rounds: u32,
    pub successes: u64,
    /// Fraction of trials that succeeded within `max_rounds`.
    pub estimate: f64,
    /// Binomial standard error of `estimate`.
    pub std_error: f64,
    /// Failed rounds that were heralded by a detector.
    pub heralded_rounds: u64,
    /// Failed rounds with silent loss. These are retried as well.
    pub lost_rounds: u64,
    /// Rounds used, summed over all trials.
    pub total_rounds: u64,
}

impl RusEstimate {
    /// `1 - (1 - p)^rounds` for a per-round success probability `p`.
    pub fn analytic(p: f64, rounds: u32) -> f64 {
        1.0 - (1.0 - p).powi(rounds as i32)
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    successes: u64,
    heralded: u64,
    lost: u64,
    rounds: u64,
}

/// Runs `trials` independent trials of up to `max_rounds` attempts each.
/// Trial `k` draws from its own stream of the seeded generator, so the
/// result does not depend on how trials are scheduled.
pub fn repeat_until_success<C: RusChannel>(
    channel: &C,
    max_rounds: u32,
    seed: u64,
    trials: u64,
) -> Result<RusEstimate, AnalysisError> {
    if max_rounds == 0 {
        return Err(AnalysisError::InvalidRus("max_rounds must be at least 1".into()));
    }
    if trials == 0 {
        return Err(AnalysisError::InvalidRus("trials must be at least 1".into()));
    }
    let tally = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut t = Tally::default();
            for _ in 0..max_rounds {
                t.rounds += 1;
                match channel.sample_round(&mut rng) {
                    RoundResult::Success => {
                        t.successes += 1;
                        break;
                    }
                    RoundResult::Heralded => t.heralded += 1,
                    RoundResult::Lost => t.lost += 1,
                }
            }
            t
        })
        .reduce(Tally::default, |a, b| Tally {
            successes: a.successes + b.successes,
            heralded: a.heralded + b.heralded,
            lost: a.lost + b.lost,
            rounds: a.rounds + b.rounds,
        });
    let estimate = tally.successes as f64 / trials as f64;
    Ok(RusEstimate {
        trials,
        max_rounds,
        successes: tally.successes,
        estimate,
        std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
        heralded_rounds: tally.heralded,
        lost_rounds: tally.lost,
        total_rounds: tally.rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stub_two_rounds() {
        let est = repeat_until_success(&StubChannel { p_success: 0.9 }, 2, 7, 100_000).unwrap();
        let sigma = (0.99f64 * 0.01 / 100_000.0).sqrt();
        assert!((est.estimate - 0.99).abs() < 3.0 * sigma, "{est:?}");
        assert_eq!(est.lost_rounds, 0);
    }

    #[test]
    fn many_rounds_approach_one() {
        let est = repeat_until_success(&StubChannel { p_success: 0.3 }, 60, 1, 10_000).unwrap();
        assert_eq!(est.estimate, 1.0);
    }

    #[test]
    fn reproducible() {
        let c = StubChannel { p_success: 0.5 };
        let a = repeat_until_success(&c, 3, 42, 5_000).unwrap();
        let b = repeat_until_success(&c, 3, 42, 5_000).unwrap();
        assert_eq!(a, b);
        let other = repeat_until_success(&c, 3, 43, 5_000).unwrap();
        assert_ne!(a.successes, other.successes);
    }

    #[test]
    fn rejects_empty_requests() {
        let c = StubChannel { p_success: 0.5 };
        assert!(repeat_until_success(&c, 0, 1, 10).is_err());
        assert!(repeat_until_success(&c, 1, 1, 0).is_err());
    }
}
