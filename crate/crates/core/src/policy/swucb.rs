//! Sliding-window UCB: each arm keeps only its most recent tau rewards.

use super::{argmax_lowest, log_guard, ArmId, BanditPolicy};
use std::collections::VecDeque;

/// Sliding-window UCB index. `window_len` is the arm's current window size,
/// `total_len` the summed window sizes of all arms.
pub fn window_score(window_sum: f64, window_len: usize, total_len: usize, alpha: f64) -> f64 {
    assert!(window_len > 0, "window score needs a non-empty window");
    assert!(total_len > 0, "window score needs observed rewards");
    window_sum / window_len as f64
        + alpha * (log_guard(total_len as f64) / window_len as f64).sqrt()
}

/// Per-arm FIFO reward windows with running sums.
pub struct WindowState {
    capacity: usize,
    queues: Vec<VecDeque<f64>>,
    sums: Vec<f64>,
    total_len: usize,
}

impl WindowState {
    /// `capacity` is the per-arm window length tau (at least 1).
    pub fn new(num_arms: usize, capacity: usize) -> Self {
        assert!(capacity >= 1, "window capacity must be at least 1");
        WindowState {
            capacity,
            queues: vec![VecDeque::new(); num_arms],
            sums: vec![0.0; num_arms],
            total_len: 0,
        }
    }

    pub fn num_arms(&self) -> usize {
        self.queues.len()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self, arm: ArmId) -> usize {
        self.queues[arm.index()].len()
    }

    pub fn is_empty(&self, arm: ArmId) -> bool {
        self.queues[arm.index()].is_empty()
    }

    pub fn first_empty(&self) -> Option<ArmId> {
        (0..self.queues.len()).map(ArmId).find(|&a| self.is_empty(a))
    }

    pub fn sum(&self, arm: ArmId) -> f64 {
        self.sums[arm.index()]
    }

    pub fn mean(&self, arm: ArmId) -> f64 {
        let len = self.len(arm);
        assert!(len > 0, "mean of an empty window");
        self.sums[arm.index()] / len as f64
    }

    /// Summed window lengths across all arms.
    pub fn total_len(&self) -> usize {
        self.total_len
    }

    /// Append a reward to the arm's window, evicting its oldest reward when
    /// the window is full.
    pub fn push(&mut self, arm: ArmId, reward: f64) {
        let q = &mut self.queues[arm.index()];
        if q.len() == self.capacity {
            let oldest = q.pop_front().expect("full window is non-empty");
            self.sums[arm.index()] -= oldest;
            self.total_len -= 1;
        }
        q.push_back(reward);
        self.sums[arm.index()] += reward;
        self.total_len += 1;
    }

    /// Window mean recomputed from the queue, for drift checks on the running
    /// sums.
    pub fn recomputed_mean(&self, arm: ArmId) -> f64 {
        let q = &self.queues[arm.index()];
        assert!(!q.is_empty(), "mean of an empty window");
        q.iter().sum::<f64>() / q.len() as f64
    }

    pub fn score(&self, arm: ArmId, alpha: f64) -> f64 {
        window_score(self.sums[arm.index()], self.len(arm), self.total_len, alpha)
    }
}

/// Sliding-window UCB policy.
pub struct SlidingWindowUcbPolicy {
    alpha: f64,
    state: WindowState,
}

impl SlidingWindowUcbPolicy {
    pub fn new(num_arms: usize, tau: usize, alpha: f64) -> Self {
        SlidingWindowUcbPolicy {
            alpha,
            state: WindowState::new(num_arms, tau),
        }
    }

    pub fn state(&self) -> &WindowState {
        &self.state
    }
}

impl BanditPolicy for SlidingWindowUcbPolicy {
    fn num_arms(&self) -> usize {
        self.state.num_arms()
    }

    fn select(&self) -> ArmId {
        if let Some(cold) = self.state.first_empty() {
            return cold;
        }
        let scores = (0..self.state.num_arms()).map(|a| self.state.score(ArmId(a), self.alpha));
        ArmId(argmax_lowest(scores).expect("at least one arm"))
    }

    fn update(&mut self, arm: ArmId, reward: f64) {
        self.state.push(arm, reward);
    }
}
