//! Empirical reward pools: finite sample sets drawn from uniformly at random.

use crate::error::Error;
use crate::Result;
use rand::Rng;

/// Closed interval every pool sample must lie in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSupport {
    pub lo: f64,
    pub hi: f64,
}

impl RewardSupport {
    /// Click/no-click rewards.
    pub const BERNOULLI: RewardSupport = RewardSupport { lo: 0.0, hi: 1.0 };
    /// Five-star integer ratings.
    pub const RATINGS: RewardSupport = RewardSupport { lo: 1.0, hi: 5.0 };

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Fixed set of observed rewards with a cached empirical mean. Sampling picks
/// a pool element uniformly at random.
#[derive(Debug, Clone)]
pub struct RewardPool {
    samples: Vec<f64>,
    mean: f64,
}

impl RewardPool {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::config("reward pool must contain at least one sample"));
        }
        if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(Error::config(format!("reward pool contains non-finite sample {bad}")));
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        Ok(RewardPool { samples, mean })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Empirical mean, fixed at construction.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn within(&self, support: RewardSupport) -> bool {
        self.samples.iter().all(|&x| support.contains(x))
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        self.samples[rng.gen_range(0..self.samples.len())]
    }
}
