//! Non-stationary multi-armed bandit laboratory: UCB-family policies with
//! forgetting mechanisms, data-driven drifting reward environments, and a
//! reproducible regret-experiment harness.

pub mod env;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod policy;
pub mod rng;

pub use error::Error;
pub use policy::{Aggregation, ArmId, BanditPolicy, PolicyKind, PolicySpec, WindowChoice};

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
