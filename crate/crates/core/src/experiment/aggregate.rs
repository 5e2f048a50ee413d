//! Cross-run aggregation: pointwise mean and population standard deviation
//! over aligned trajectories.

use super::episode::Trajectory;
use crate::error::Error;
use crate::Result;

/// Mean and population standard deviation (divide by n, not n-1).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    assert!(!xs.is_empty(), "mean of an empty sample");
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Aligned aggregate of several runs of the same configuration.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub ts: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub runs: usize,
}

/// Aggregate trajectories recorded on identical step grids. Misaligned grids
/// are an invariant error, not silently interpolated.
pub fn aggregate_runs(runs: &[Trajectory]) -> Result<RunSummary> {
    if runs.is_empty() {
        return Err(Error::config("cannot aggregate zero runs"));
    }
    let ts: Vec<u64> = runs[0].points.iter().map(|p| p.t).collect();
    for r in runs.iter().skip(1) {
        let other: Vec<u64> = r.points.iter().map(|p| p.t).collect();
        if other != ts {
            return Err(Error::invariant(format!(
                "trajectory grids differ between runs of {}/{}",
                r.scenario, r.policy_id
            )));
        }
    }
    let mut mean = Vec::with_capacity(ts.len());
    let mut std = Vec::with_capacity(ts.len());
    for i in 0..ts.len() {
        let xs: Vec<f64> = runs.iter().map(|r| r.points[i].cum_regret).collect();
        let (m, s) = mean_std(&xs);
        mean.push(m);
        std.push(s);
    }
    Ok(RunSummary { ts, mean, std, runs: runs.len() })
}
