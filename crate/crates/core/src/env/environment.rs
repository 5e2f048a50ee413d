//! Drifting environment: arms mapped onto reward pools, with scheduled pool
//! exchanges (abrupt) and interpolated transitions (gradual).

use super::drift::{gradual_lambda, swap_pairs, DriftEvent, DriftKind, DriftSchedule};
use super::pool::{RewardPool, RewardSupport};
use crate::error::Error;
use crate::policy::{argmax_lowest, ArmId};
use crate::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A gradual transition currently in progress.
#[derive(Debug, Clone)]
struct ActiveWindow {
    start: u64,
    duration: u64,
    /// Arm index pairs being exchanged (better-ranked arm first).
    pairs: Vec<(usize, usize)>,
}

impl ActiveWindow {
    fn end(&self) -> u64 {
        self.start + self.duration
    }

    fn partner(&self, arm: usize) -> Option<usize> {
        for &(a, b) in &self.pairs {
            if a == arm {
                return Some(b);
            }
            if b == arm {
                return Some(a);
            }
        }
        None
    }
}

/// Simulation environment. Arm i starts on pool i; drift events exchange the
/// assignments of the two best and two worst arms. Time is 1-based: step t
/// covers the t-th interaction, and abrupt changes at t apply before it.
pub struct Environment {
    pools: Arc<Vec<RewardPool>>,
    assignment: Vec<usize>,
    schedule: DriftSchedule,
    support: RewardSupport,
    horizon: u64,
    rng: ChaCha8Rng,
    current_step: u64,
    next_event: usize,
    active: Option<ActiveWindow>,
}

impl Environment {
    pub fn new(
        pools: Arc<Vec<RewardPool>>,
        schedule: DriftSchedule,
        support: RewardSupport,
        horizon: u64,
        rng: ChaCha8Rng,
    ) -> Result<Self> {
        if pools.is_empty() {
            return Err(Error::config("environment needs at least one arm/pool"));
        }
        if horizon == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        for (i, p) in pools.iter().enumerate() {
            if !p.within(support) {
                return Err(Error::config(format!(
                    "pool {i} has samples outside support [{}, {}]",
                    support.lo, support.hi
                )));
            }
        }
        if !schedule.is_empty() && pools.len() < 4 {
            return Err(Error::config(format!(
                "drift schedules need at least 4 arms, got {}",
                pools.len()
            )));
        }
        for e in schedule.events() {
            if e.start > horizon || e.end() > horizon {
                return Err(Error::config("drift schedule exceeds environment horizon"));
            }
        }
        let assignment = (0..pools.len()).collect();
        Ok(Environment {
            pools,
            assignment,
            schedule,
            support,
            horizon,
            rng,
            current_step: 0,
            next_event: 0,
            active: None,
        })
    }

    pub fn num_arms(&self) -> usize {
        self.assignment.len()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn current_step(&self) -> u64 {
        self.current_step
    }

    pub fn schedule(&self) -> &DriftSchedule {
        &self.schedule
    }

    pub fn support(&self) -> RewardSupport {
        self.support
    }

    /// Same pools, schedule, and horizon, with dynamics rewound to step zero
    /// and a caller-supplied reward stream.
    pub fn fresh_copy(&self, rng: ChaCha8Rng) -> Environment {
        Environment {
            pools: Arc::clone(&self.pools),
            assignment: (0..self.pools.len()).collect(),
            schedule: self.schedule.clone(),
            support: self.support,
            horizon: self.horizon,
            rng,
            current_step: 0,
            next_event: 0,
            active: None,
        }
    }

    fn assigned_mean(&self, arm: usize) -> f64 {
        self.pools[self.assignment[arm]].mean()
    }

    fn exchange(&mut self, pairs: &[(usize, usize)]) {
        for &(a, b) in pairs {
            self.assignment.swap(a, b);
        }
    }

    fn current_assigned_means(&self) -> Vec<f64> {
        (0..self.num_arms()).map(|a| self.assigned_mean(a)).collect()
    }

    /// Move simulation time forward to step t, applying every drift event
    /// that starts (or completes) on the way. Steps must strictly increase.
    pub fn advance_to(&mut self, t: u64) {
        assert!(
            t > self.current_step && t <= self.horizon,
            "advance_to({t}) out of order (current {}, horizon {})",
            self.current_step,
            self.horizon
        );
        self.current_step = t;
        if let Some(w) = &self.active {
            if t >= w.end() {
                let pairs = w.pairs.clone();
                self.exchange(&pairs);
                self.active = None;
            }
        }
        while self.next_event < self.schedule.events().len() {
            let e: DriftEvent = self.schedule.events()[self.next_event];
            if e.start > t {
                break;
            }
            let pairs = swap_pairs(&self.current_assigned_means())
                .expect("arm count validated at construction");
            match e.kind {
                DriftKind::Abrupt => self.exchange(&pairs),
                DriftKind::Gradual => {
                    if e.end() <= t {
                        self.exchange(&pairs);
                    } else {
                        self.active = Some(ActiveWindow {
                            start: e.start,
                            duration: e.duration,
                            pairs,
                        });
                    }
                }
            }
            self.next_event += 1;
        }
    }

    /// True expected reward of an arm at the current step. Inside a gradual
    /// window, exchanged arms interpolate linearly between their own pool
    /// mean and their partner's.
    pub fn true_mean(&self, arm: ArmId) -> f64 {
        let a = arm.index();
        if let Some(w) = &self.active {
            if let Some(b) = w.partner(a) {
                let lam = gradual_lambda(self.current_step, w.start, w.duration);
                return (1.0 - lam) * self.assigned_mean(a) + lam * self.assigned_mean(b);
            }
        }
        self.assigned_mean(a)
    }

    pub fn true_means(&self) -> Vec<f64> {
        (0..self.num_arms()).map(|a| self.true_mean(ArmId(a))).collect()
    }

    /// Best arm and its true mean at the current step, ties toward the lowest
    /// index.
    pub fn oracle(&self) -> (ArmId, f64) {
        let means = self.true_means();
        let best = argmax_lowest(means.iter().copied()).expect("at least one arm");
        (ArmId(best), means[best])
    }

    pub fn min_mean(&self) -> f64 {
        self.true_means().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Draw a reward for the arm at the current step. Inside a gradual window
    /// an exchanged arm draws from its partner's pool with probability
    /// lambda, realizing the interpolated mean.
    pub fn sample(&mut self, arm: ArmId) -> f64 {
        let a = arm.index();
        let mut pool_idx = self.assignment[a];
        if let Some(w) = &self.active {
            if let Some(b) = w.partner(a) {
                let lam = gradual_lambda(self.current_step, w.start, w.duration);
                if self.rng.gen::<f64>() < lam {
                    pool_idx = self.assignment[b];
                }
            }
        }
        self.pools[pool_idx].draw(&mut self.rng)
    }
}

/// One exported point of a true-mean trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSample {
    pub t: u64,
    pub arm: ArmId,
    pub mean: f64,
}

/// Per-arm true means over the whole horizon, decimated to `stride` steps
/// plus forced samples at every drift boundary and the final step. The
/// environment must be fresh (step zero) and is consumed by the walk.
pub fn mean_trajectories(env: &mut Environment, stride: u64) -> Vec<MeanSample> {
    assert!(env.current_step() == 0, "mean export needs a fresh environment");
    assert!(stride >= 1, "stride must be at least 1");
    let horizon = env.horizon();
    let mut forced: Vec<u64> = Vec::new();
    for e in env.schedule().events() {
        forced.push(e.start);
        if e.kind == DriftKind::Gradual {
            forced.push(e.end());
        }
    }
    let mut out = Vec::new();
    for t in 1..=horizon {
        env.advance_to(t);
        if t % stride == 0 || t == horizon || forced.contains(&t) {
            for a in 0..env.num_arms() {
                out.push(MeanSample { t, arm: ArmId(a), mean: env.true_mean(ArmId(a)) });
            }
        }
    }
    out
}
