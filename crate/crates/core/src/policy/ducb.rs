//! Discounted UCB: exponentially decayed sums and counts, so old rewards fade
//! at rate gamma every round.

use super::{argmax_lowest, log_guard, ArmId, BanditPolicy, EPS_COUNT};

/// Discounted UCB index from decayed statistics. `discounted_count` must be
/// meaningfully positive (above [`EPS_COUNT`]); `total_count` is the decayed
/// count summed over all arms.
pub fn discounted_score(
    discounted_sum: f64,
    discounted_count: f64,
    total_count: f64,
    alpha: f64,
) -> f64 {
    assert!(
        discounted_count > EPS_COUNT,
        "discounted score needs a warm arm (count {discounted_count})"
    );
    assert!(total_count > 0.0, "discounted score needs elapsed rounds");
    discounted_sum / discounted_count + alpha * (log_guard(total_count) / discounted_count).sqrt()
}

/// Per-arm decayed sums and counts. Every round the chosen arm gets
/// `S <- gamma*S + r, N <- gamma*N + 1` and all other arms just decay.
pub struct DiscountedState {
    gamma: f64,
    sums: Vec<f64>,
    counts: Vec<f64>,
}

impl DiscountedState {
    pub fn new(num_arms: usize, gamma: f64) -> Self {
        DiscountedState {
            gamma,
            sums: vec![0.0; num_arms],
            counts: vec![0.0; num_arms],
        }
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn sum(&self, arm: ArmId) -> f64 {
        self.sums[arm.index()]
    }

    pub fn count(&self, arm: ArmId) -> f64 {
        self.counts[arm.index()]
    }

    /// Cold means the decayed count has (re)dropped to effectively zero.
    pub fn is_cold(&self, arm: ArmId) -> bool {
        self.counts[arm.index()] <= EPS_COUNT
    }

    pub fn first_cold(&self) -> Option<ArmId> {
        (0..self.counts.len()).map(ArmId).find(|&a| self.is_cold(a))
    }

    /// Decayed count summed over all arms.
    pub fn total_count(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn update(&mut self, chosen: ArmId, reward: f64) {
        for a in 0..self.counts.len() {
            if a == chosen.index() {
                self.sums[a] = self.gamma * self.sums[a] + reward;
                self.counts[a] = self.gamma * self.counts[a] + 1.0;
            } else {
                self.sums[a] *= self.gamma;
                self.counts[a] *= self.gamma;
            }
        }
    }

    pub fn score(&self, arm: ArmId, total_count: f64, alpha: f64) -> f64 {
        discounted_score(self.sums[arm.index()], self.counts[arm.index()], total_count, alpha)
    }
}

/// Discounted UCB policy.
pub struct DiscountedUcbPolicy {
    alpha: f64,
    state: DiscountedState,
}

impl DiscountedUcbPolicy {
    pub fn new(num_arms: usize, gamma: f64, alpha: f64) -> Self {
        DiscountedUcbPolicy {
            alpha,
            state: DiscountedState::new(num_arms, gamma),
        }
    }

    pub fn state(&self) -> &DiscountedState {
        &self.state
    }
}

impl BanditPolicy for DiscountedUcbPolicy {
    fn num_arms(&self) -> usize {
        self.state.num_arms()
    }

    fn select(&self) -> ArmId {
        if let Some(cold) = self.state.first_cold() {
            return cold;
        }
        let total = self.state.total_count();
        let scores = (0..self.state.num_arms()).map(|a| self.state.score(ArmId(a), total, self.alpha));
        ArmId(argmax_lowest(scores).expect("at least one arm"))
    }

    fn update(&mut self, arm: ArmId, reward: f64) {
        self.state.update(arm, reward);
    }
}
