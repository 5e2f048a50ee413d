//! Synthetic reward pools with exactly controlled empirical means.

use crate::env::RewardPool;
use crate::error::Error;
use crate::Result;

/// Bernoulli pool whose empirical mean is exactly `mean`: requires
/// `mean * size` to be an integer (within rounding noise).
pub fn bernoulli_pool(mean: f64, size: usize) -> Result<RewardPool> {
    if size == 0 {
        return Err(Error::config("pool size must be at least 1"));
    }
    if !(0.0..=1.0).contains(&mean) {
        return Err(Error::config(format!("bernoulli mean {mean} outside [0, 1]")));
    }
    let ones_f = mean * size as f64;
    let ones = ones_f.round();
    if (ones_f - ones).abs() > 1e-9 {
        return Err(Error::config(format!(
            "bernoulli mean {mean} is not exactly representable with {size} samples"
        )));
    }
    let ones = ones as usize;
    let mut samples = vec![1.0; ones];
    samples.extend(std::iter::repeat(0.0).take(size - ones));
    RewardPool::new(samples)
}

/// Integer-rating pool (values 1..=5) whose empirical mean is `mean` rounded
/// to the nearest multiple of 1/size: a mixture of the two adjacent integers.
pub fn ratings_pool(mean: f64, size: usize) -> Result<RewardPool> {
    if size == 0 {
        return Err(Error::config("pool size must be at least 1"));
    }
    if !(1.0..=5.0).contains(&mean) {
        return Err(Error::config(format!("rating mean {mean} outside [1, 5]")));
    }
    let total = (mean * size as f64).round() as u64;
    let q = total / size as u64;
    let r = (total % size as u64) as usize;
    let mut samples = vec![q as f64; size - r];
    samples.extend(std::iter::repeat(q as f64 + 1.0).take(r));
    RewardPool::new(samples)
}

pub fn bernoulli_pools(means: &[f64], size: usize) -> Result<Vec<RewardPool>> {
    means.iter().map(|&m| bernoulli_pool(m, size)).collect()
}

pub fn ratings_pools(means: &[f64], size: usize) -> Result<Vec<RewardPool>> {
    means.iter().map(|&m| ratings_pool(m, size)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_mean_is_exact() {
        let p = bernoulli_pool(0.3, 10).unwrap();
        assert_eq!(p.mean(), 0.3);
        assert_eq!(p.samples().iter().filter(|&&x| x == 1.0).count(), 3);
    }

    #[test]
    fn bernoulli_rejects_unrepresentable_mean() {
        assert!(bernoulli_pool(0.5, 1).is_err());
        assert!(bernoulli_pool(0.5, 2).is_ok());
        assert!(bernoulli_pool(1.5, 10).is_err());
    }

    #[test]
    fn ratings_pure_pool_at_integer_mean() {
        let p = ratings_pool(5.0, 4).unwrap();
        assert_eq!(p.samples(), &[5.0, 5.0, 5.0, 5.0]);
    }

    #[test]
    fn ratings_mixture_hits_target_within_half_step() {
        let p = ratings_pool(4.3, 10).unwrap();
        assert_eq!(p.len(), 10);
        assert!((p.mean() - 4.3).abs() <= 0.5 / 10.0 + 1e-12);
        assert!(p.samples().iter().all(|&x| x == 4.0 || x == 5.0));
    }

    #[test]
    fn ratings_mean_is_adjacent_integer_mixture() {
        let p = ratings_pool(2.5, 4).unwrap();
        // total = 10 -> two 2s and two 3s
        assert_eq!(p.samples(), &[2.0, 2.0, 3.0, 3.0]);
        assert_eq!(p.mean(), 2.5);
    }

    #[test]
    fn pools_builders_propagate_errors() {
        assert!(bernoulli_pools(&[0.2, 0.5], 10).is_ok());
        assert!(bernoulli_pools(&[0.2, 0.55], 10).is_err());
        assert_eq!(ratings_pools(&[3.9, 2.7], 500).unwrap().len(), 2);
    }
}
