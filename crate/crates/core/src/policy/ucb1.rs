//! Stationary UCB1 baseline with full-history sample means.

use super::{argmax_lowest, log_guard, ArmId, BanditPolicy};

/// UCB1 index: sample mean plus a confidence bonus that grows with elapsed
/// rounds and shrinks with the arm's pull count.
pub fn ucb1_score(mean_estimate: f64, pull_count: u64, rounds_elapsed: u64, alpha: f64) -> f64 {
    assert!(pull_count > 0, "ucb1 score needs at least one pull");
    assert!(rounds_elapsed > 0, "ucb1 score needs at least one elapsed round");
    mean_estimate + alpha * (log_guard(rounds_elapsed as f64) / pull_count as f64).sqrt()
}

/// Classic UCB1 over the complete reward history.
pub struct Ucb1Policy {
    alpha: f64,
    sums: Vec<f64>,
    counts: Vec<u64>,
    rounds: u64,
}

impl Ucb1Policy {
    pub fn new(num_arms: usize, alpha: f64) -> Self {
        Ucb1Policy {
            alpha,
            sums: vec![0.0; num_arms],
            counts: vec![0; num_arms],
            rounds: 0,
        }
    }

    pub fn pull_count(&self, arm: ArmId) -> u64 {
        self.counts[arm.index()]
    }
}

impl BanditPolicy for Ucb1Policy {
    fn num_arms(&self) -> usize {
        self.counts.len()
    }

    fn select(&self) -> ArmId {
        if let Some(cold) = self.counts.iter().position(|&c| c == 0) {
            return ArmId(cold);
        }
        let scores = (0..self.counts.len()).map(|a| {
            ucb1_score(
                self.sums[a] / self.counts[a] as f64,
                self.counts[a],
                self.rounds,
                self.alpha,
            )
        });
        ArmId(argmax_lowest(scores).expect("at least one arm"))
    }

    fn update(&mut self, arm: ArmId, reward: f64) {
        self.sums[arm.index()] += reward;
        self.counts[arm.index()] += 1;
        self.rounds += 1;
    }
}
