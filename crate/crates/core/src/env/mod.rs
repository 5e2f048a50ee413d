//! Reward environments: empirical pools, drift schedules, the simulation
//! environment itself, and a step-exact drift validator.

mod drift;
mod environment;
mod pool;
mod validate;

pub use drift::{gradual_lambda, swap_pairs, DriftEvent, DriftKind, DriftSchedule};
pub use environment::{mean_trajectories, Environment, MeanSample};
pub use pool::{RewardPool, RewardSupport};
pub use validate::{validate_drift, DriftReport, DriftViolation};
