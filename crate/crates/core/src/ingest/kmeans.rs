//! Lloyd's K-Means with seeded Forgy initialization, multiple restarts, and a
//! warm-started SSE curve that is non-increasing in K by construction.

use crate::error::Error;
use crate::rng::derive_rng;
use crate::Result;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct KMeansConfig {
    /// Cap on assignment/update cycles per run.
    pub max_iters: usize,
    /// Independent random initializations; the best final SSE wins, earlier
    /// restarts win ties.
    pub restarts: usize,
    /// Base seed for the derived initialization streams.
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig { max_iters: 300, restarts: 10, seed: 0 }
    }
}

/// Fitted clustering.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index per input point.
    pub assignments: Vec<usize>,
    /// Total within-cluster sum of squared distances.
    pub sse: f64,
    /// SSE measured after each assignment step of the winning run.
    pub iteration_sse: Vec<f64>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid per point, ties toward the lowest centroid index.
fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d = dist2(p, c);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            best
        })
        .collect()
}

fn sse_of(points: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| dist2(p, &centroids[a]))
        .sum()
}

/// One Lloyd run from the given initial centroids. Converges when an
/// assignment pass leaves the partition unchanged or the iteration cap is
/// hit. Empty clusters are reseeded at the point farthest from its own
/// centroid.
fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, max_iters: usize) -> ClusterModel {
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignments: Vec<usize> = Vec::new();
    let mut iteration_sse = Vec::new();

    for _ in 0..max_iters {
        let new_assignments = assign(points, &centroids);
        if new_assignments == assignments {
            break;
        }
        assignments = new_assignments;
        iteration_sse.push(sse_of(points, &centroids, &assignments));

        // update step: means of the members, then repair empty clusters
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for s in sums[j].iter_mut() {
                    *s /= counts[j] as f64;
                }
                centroids[j] = std::mem::take(&mut sums[j]);
            }
        }
        let empties: Vec<usize> = (0..k).filter(|&j| counts[j] == 0).collect();
        if !empties.is_empty() {
            let mut used = vec![false; points.len()];
            for j in empties {
                let mut far = None;
                for (i, p) in points.iter().enumerate() {
                    if used[i] {
                        continue;
                    }
                    let d = dist2(p, &centroids[assignments[i]]);
                    far = match far {
                        None => Some((i, d)),
                        Some((_, fd)) if d > fd => Some((i, d)),
                        keep => keep,
                    };
                }
                if let Some((i, _)) = far {
                    used[i] = true;
                    centroids[j] = points[i].clone();
                }
            }
        }
    }

    // final SSE against the settled centroids (the loop measures against the
    // pre-update centroids of each pass)
    let sse = sse_of(points, &centroids, &assignments);
    ClusterModel { k, centroids, assignments, sse, iteration_sse }
}

fn validate(points: &[Vec<f64>], k: usize) -> Result<()> {
    if points.is_empty() {
        return Err(Error::config("k-means needs at least one point"));
    }
    if k == 0 || k > points.len() {
        return Err(Error::config(format!(
            "k must lie in 1..={} (points), got {k}",
            points.len()
        )));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::config("points must share one positive dimension"));
    }
    Ok(())
}

/// Forgy initialization: k distinct sample indices from a derived stream.
fn forgy_init(points: &[Vec<f64>], k: usize, seed: u64, label: &str) -> Vec<Vec<f64>> {
    let mut rng = derive_rng(seed, label);
    let mut idx: Vec<usize> = (0..points.len()).collect();
    for i in 0..k {
        let j = rng.gen_range(i..idx.len());
        idx.swap(i, j);
    }
    idx[..k].iter().map(|&i| points[i].clone()).collect()
}

/// Best-of-restarts K-Means.
pub fn kmeans(points: &[Vec<f64>], k: usize, cfg: &KMeansConfig) -> Result<ClusterModel> {
    validate(points, k)?;
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(Error::config("k-means needs at least one restart and iteration"));
    }
    let runs: Vec<ClusterModel> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let init = forgy_init(points, k, cfg.seed, &format!("kmeans/k={k}/restart={r}"));
            lloyd(points, init, cfg.max_iters)
        })
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|best, cand| if cand.sse < best.sse { cand } else { best })
        .expect("at least one restart"))
}

/// Greedy farthest-point extension of a centroid set.
fn extend_farthest(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>, target: usize) -> Vec<Vec<f64>> {
    while centroids.len() < target {
        let mut far = None;
        for (i, p) in points.iter().enumerate() {
            let d = centroids
                .iter()
                .map(|c| dist2(p, c))
                .fold(f64::INFINITY, f64::min);
            far = match far {
                None => Some((i, d)),
                Some((_, fd)) if d > fd => Some((i, d)),
                keep => keep,
            };
        }
        centroids.push(points[far.expect("non-empty points").0].clone());
    }
    centroids
}

/// SSE for each K in the inclusive range, non-increasing in K: each K also
/// tries a warm start built from the previous K's winning centroids plus
/// farthest points, which can only improve on the previous SSE.
pub fn sse_curve(
    points: &[Vec<f64>],
    k_min: usize,
    k_max: usize,
    cfg: &KMeansConfig,
) -> Result<Vec<(usize, f64)>> {
    if k_min == 0 || k_min > k_max {
        return Err(Error::config(format!("bad K range {k_min}..={k_max}")));
    }
    validate(points, k_max)?;
    let mut curve = Vec::new();
    let mut prev: Option<ClusterModel> = None;
    for k in k_min..=k_max {
        let mut best = kmeans(points, k, cfg)?;
        if let Some(p) = &prev {
            let init = extend_farthest(points, p.centroids.clone(), k);
            let warm = lloyd(points, init, cfg.max_iters);
            if warm.sse < best.sse {
                best = warm;
            }
        }
        curve.push((k, best.sse));
        prev = Some(best);
    }
    Ok(curve)
}
