//! Data ingestion: real dataset parsing, user clustering, and synthetic pool
//! construction, all ending in the same `RewardPool` currency.

mod features;
mod kmeans;
mod movielens;
mod obd;
mod synth;

pub use features::{encode_users, FEATURE_DIM};
pub use kmeans::{kmeans, sse_curve, ClusterModel, KMeansConfig};
pub use movielens::{
    drop_orphans, parse_ratings, parse_users, ParseStats, RatingRecord, UserRecord, AGE_CODES,
    NUM_OCCUPATIONS,
};
pub use obd::{click_pools, parse_click_log, ClickLogConfig};
pub use synth::{bernoulli_pool, bernoulli_pools, ratings_pool, ratings_pools};

use crate::env::RewardPool;
use crate::error::Error;
use crate::Result;
use std::collections::HashMap;

/// One rating pool per user cluster (arm = cluster), pools collecting every
/// rating by that cluster's users in file order. Every cluster must end up
/// with at least one rating.
pub fn cluster_rating_pools(
    users: &[UserRecord],
    assignments: &[usize],
    k: usize,
    ratings: &[RatingRecord],
) -> Result<Vec<RewardPool>> {
    if users.len() != assignments.len() {
        return Err(Error::invariant(format!(
            "{} users but {} cluster assignments",
            users.len(),
            assignments.len()
        )));
    }
    let cluster_of: HashMap<u64, usize> = users
        .iter()
        .zip(assignments)
        .map(|(u, &a)| (u.user_id, a))
        .collect();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); k];
    for r in ratings {
        let Some(&c) = cluster_of.get(&r.user_id) else {
            continue;
        };
        if c >= k {
            return Err(Error::invariant(format!("cluster index {c} out of range 0..{k}")));
        }
        buckets[c].push(r.rating as f64);
    }
    buckets
        .into_iter()
        .enumerate()
        .map(|(c, b)| {
            if b.is_empty() {
                Err(Error::config(format!("cluster {c} has no ratings; cannot form an arm")))
            } else {
                RewardPool::new(b)
            }
        })
        .collect()
}
