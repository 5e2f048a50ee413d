//! Step-exact drift validation: replays an environment against an
//! independently maintained model of what every arm's mean must be at every
//! step, and reports any disagreement.

use super::drift::{gradual_lambda, DriftEvent, DriftKind};
use super::environment::Environment;
use crate::Result;

/// One step/arm disagreement between the environment and the model.
#[derive(Debug, Clone)]
pub struct DriftViolation {
    pub t: u64,
    pub arm: usize,
    pub expected: f64,
    pub actual: f64,
    pub what: String,
}

/// Outcome of a full-horizon validation walk.
#[derive(Debug, Clone)]
pub struct DriftReport {
    pub steps_checked: u64,
    pub events_checked: usize,
    pub violations: Vec<DriftViolation>,
}

impl DriftReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

struct ModelWindow {
    start: u64,
    duration: u64,
    pairs: Vec<(usize, usize)>,
    base: Vec<f64>,
}

/// Ranking and pairing maintained separately from the environment's own
/// implementation, so a shared bug cannot hide.
fn model_swap_pairs(means: &[f64]) -> Vec<(usize, usize)> {
    let n = means.len();
    assert!(n >= 4, "model pairing needs at least 4 arms");
    let mut best = Vec::new();
    let mut worst = Vec::new();
    let mut taken = vec![false; n];
    for _ in 0..2 {
        let mut pick = None;
        for i in 0..n {
            if taken[i] {
                continue;
            }
            pick = match pick {
                None => Some(i),
                Some(j) if means[i] > means[j] => Some(i),
                keep => keep,
            };
        }
        let i = pick.unwrap();
        taken[i] = true;
        best.push(i);
    }
    for _ in 0..2 {
        let mut pick = None;
        for i in (0..n).rev() {
            if taken[i] {
                continue;
            }
            pick = match pick {
                None => Some(i),
                Some(j) if means[i] < means[j] => Some(i),
                keep => keep,
            };
        }
        let i = pick.unwrap();
        taken[i] = true;
        worst.push(i);
    }
    vec![(best[0], worst[0]), (best[1], worst[1])]
}

/// Walk the environment step by step over its full horizon, comparing every
/// arm's reported mean (exact equality) against the model, and checking mean
/// multiset conservation outside gradual windows. The environment must be
/// fresh.
pub fn validate_drift(env: &mut Environment) -> Result<DriftReport> {
    assert!(env.current_step() == 0, "validation needs a fresh environment");
    let horizon = env.horizon();
    let events: Vec<DriftEvent> = env.schedule().events().to_vec();
    let n = env.num_arms();

    let initial = env.true_means();
    let mut sorted_initial = initial.clone();
    sorted_initial.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut expected = initial;
    let mut cursor = 0usize;
    let mut window: Option<ModelWindow> = None;
    let mut violations = Vec::new();

    for t in 1..=horizon {
        env.advance_to(t);
        let observed = env.true_means();

        if let Some(w) = &window {
            if t >= w.start + w.duration {
                for &(a, b) in &w.pairs {
                    expected[a] = w.base[b];
                    expected[b] = w.base[a];
                }
                window = None;
            }
        }
        while cursor < events.len() && events[cursor].start <= t {
            let e = events[cursor];
            let pairs = model_swap_pairs(&expected);
            match e.kind {
                DriftKind::Abrupt => {
                    for &(a, b) in &pairs {
                        expected.swap(a, b);
                    }
                }
                DriftKind::Gradual => {
                    if e.end() <= t {
                        for &(a, b) in &pairs {
                            expected.swap(a, b);
                        }
                    } else {
                        window = Some(ModelWindow {
                            start: e.start,
                            duration: e.duration,
                            pairs,
                            base: expected.clone(),
                        });
                    }
                }
            }
            cursor += 1;
        }

        let mut view = expected.clone();
        if let Some(w) = &window {
            let lam = gradual_lambda(t, w.start, w.duration);
            for &(a, b) in &w.pairs {
                view[a] = (1.0 - lam) * w.base[a] + lam * w.base[b];
                view[b] = (1.0 - lam) * w.base[b] + lam * w.base[a];
            }
        }

        for a in 0..n {
            if observed[a] != view[a] {
                violations.push(DriftViolation {
                    t,
                    arm: a,
                    expected: view[a],
                    actual: observed[a],
                    what: "mean deviates from drift model".into(),
                });
            }
        }

        if window.is_none() {
            let mut sorted_now = observed.clone();
            sorted_now.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if sorted_now != sorted_initial {
                violations.push(DriftViolation {
                    t,
                    arm: usize::MAX,
                    expected: f64::NAN,
                    actual: f64::NAN,
                    what: "mean multiset not conserved outside windows".into(),
                });
            }
        }
    }

    Ok(DriftReport {
        steps_checked: horizon,
        events_checked: events.len(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::drift::DriftSchedule;
    use crate::env::pool::{RewardPool, RewardSupport};
    use crate::rng::derive_rng;
    use std::sync::Arc;

    fn env_with(events: Vec<DriftEvent>, horizon: u64) -> Environment {
        let means: [f64; 5] = [0.9, 0.7, 0.5, 0.3, 0.1];
        let pools: Vec<RewardPool> = means
            .iter()
            .map(|&m| {
                let ones = (m * 10.0).round() as usize;
                let mut s = vec![1.0; ones];
                s.extend(std::iter::repeat(0.0).take(10 - ones));
                RewardPool::new(s).unwrap()
            })
            .collect();
        Environment::new(
            Arc::new(pools),
            DriftSchedule::new(events, horizon).unwrap(),
            RewardSupport::BERNOULLI,
            horizon,
            derive_rng(3, "validate-test"),
        )
        .unwrap()
    }

    #[test]
    fn model_pairing_agrees_with_reference_case() {
        assert_eq!(
            model_swap_pairs(&[0.9, 0.7, 0.5, 0.3, 0.1]),
            vec![(0, 4), (1, 3)]
        );
        assert_eq!(
            model_swap_pairs(&[0.1, 0.9, 0.3, 0.7, 0.5]),
            vec![(1, 0), (3, 2)]
        );
        assert_eq!(model_swap_pairs(&[0.5, 0.5, 0.5, 0.5]), vec![(0, 3), (1, 2)]);
    }

    #[test]
    fn clean_run_for_mixed_schedule() {
        let mut env = env_with(
            vec![
                DriftEvent::abrupt(50),
                DriftEvent::gradual(100, 40),
                DriftEvent::abrupt(200),
            ],
            300,
        );
        let report = validate_drift(&mut env).unwrap();
        assert!(report.is_clean(), "violations: {:?}", report.violations);
        assert_eq!(report.steps_checked, 300);
        assert_eq!(report.events_checked, 3);
    }

    #[test]
    fn stationary_run_is_clean() {
        let mut env = env_with(vec![], 100);
        let report = validate_drift(&mut env).unwrap();
        assert!(report.is_clean());
    }
}
