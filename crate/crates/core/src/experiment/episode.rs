//! One policy/environment episode with oracle regret accounting, plus the
//! shared reward-tape mode used for policy-equivalence checks.

use crate::env::{DriftKind, DriftSchedule, Environment};
use crate::error::Error;
use crate::policy::{ArmId, BanditPolicy};
use crate::Result;
use std::collections::BTreeSet;

/// Everything observed at one step, kept only when raw trajectories are
/// requested.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: u64,
    pub arm: ArmId,
    pub reward: f64,
    pub oracle_arm: ArmId,
    pub oracle_mean: f64,
    pub chosen_mean: f64,
    pub step_regret: f64,
    pub cum_regret: f64,
}

/// Decimated cumulative-regret sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: u64,
    pub cum_regret: f64,
}

/// Result of one episode, tagged with its coordinates in the experiment.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scenario: String,
    pub policy_id: String,
    pub run_index: u32,
    pub points: Vec<TrajectoryPoint>,
    pub final_regret: f64,
    pub choices_digest: u64,
    pub steps: Option<Vec<StepRecord>>,
}

/// Pre-sampled rewards for every (step, arm) pair of one environment walk.
/// Replaying different policies against the same tape removes reward-stream
/// variance between them.
pub struct RewardTape {
    horizon: u64,
    num_arms: usize,
    rewards: Vec<f64>,
}

impl RewardTape {
    /// Walk a fresh environment over its whole horizon, drawing one reward
    /// per arm per step (in arm order) from the environment's stream.
    pub fn generate(env: &mut Environment) -> Result<Self> {
        if env.current_step() != 0 {
            return Err(Error::invariant("tape generation needs a fresh environment"));
        }
        let horizon = env.horizon();
        let num_arms = env.num_arms();
        let mut rewards = Vec::with_capacity((horizon as usize) * num_arms);
        for t in 1..=horizon {
            env.advance_to(t);
            for a in 0..num_arms {
                rewards.push(env.sample(ArmId(a)));
            }
        }
        Ok(RewardTape { horizon, num_arms, rewards })
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn reward(&self, t: u64, arm: ArmId) -> f64 {
        assert!(t >= 1 && t <= self.horizon, "tape step {t} out of range");
        self.rewards[(t - 1) as usize * self.num_arms + arm.index()]
    }
}

/// Steps that must be recorded regardless of stride: every event start and
/// every gradual window end.
pub fn forced_record_steps(schedule: &DriftSchedule) -> BTreeSet<u64> {
    let mut forced = BTreeSet::new();
    for e in schedule.events() {
        forced.insert(e.start);
        if e.kind == DriftKind::Gradual {
            forced.insert(e.end());
        }
    }
    forced
}

pub struct EpisodeOptions<'a> {
    /// Record every `record_stride` steps (plus forced steps and the final
    /// step).
    pub record_stride: u64,
    pub forced_records: &'a BTreeSet<u64>,
    /// Keep the full per-step record.
    pub keep_steps: bool,
    /// Replay rewards from this tape instead of sampling the environment.
    pub tape: Option<&'a RewardTape>,
}

/// Raw episode outcome before experiment coordinates are attached.
#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub points: Vec<TrajectoryPoint>,
    pub final_regret: f64,
    pub choices_digest: u64,
    pub steps: Option<Vec<StepRecord>>,
}

/// Run the policy against the environment for the full horizon. Regret is
/// measured against the oracle (true best mean each step), never against the
/// sampled rewards.
pub fn run_episode(
    env: &mut Environment,
    policy: &mut dyn BanditPolicy,
    opts: &EpisodeOptions,
) -> Result<EpisodeOutcome> {
    if env.current_step() != 0 {
        return Err(Error::invariant("episodes need a fresh environment"));
    }
    if policy.num_arms() != env.num_arms() {
        return Err(Error::config(format!(
            "policy has {} arms but environment has {}",
            policy.num_arms(),
            env.num_arms()
        )));
    }
    if opts.record_stride == 0 {
        return Err(Error::config("record stride must be at least 1"));
    }
    if let Some(tape) = opts.tape {
        if tape.horizon() != env.horizon() || tape.num_arms() != env.num_arms() {
            return Err(Error::config("tape shape does not match the environment"));
        }
    }

    let horizon = env.horizon();
    let mut cum = 0.0_f64;
    let mut points = Vec::new();
    let mut steps = opts.keep_steps.then(Vec::new);
    let mut digest: u64 = 0xcbf29ce484222325;

    for t in 1..=horizon {
        env.advance_to(t);
        let arm = policy.select();
        let reward = match opts.tape {
            Some(tape) => tape.reward(t, arm),
            None => env.sample(arm),
        };
        let means = env.true_means();
        let (oracle_arm, oracle_mean) = env.oracle();
        let chosen_mean = means[arm.index()];
        let min_mean = means.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        let r = oracle_mean - chosen_mean;
        assert!(r >= 0.0, "negative step regret {r} at t={t}");
        assert!(
            r <= oracle_mean - min_mean,
            "step regret {r} exceeds worst-case gap at t={t}"
        );
        cum += r;
        policy.update(arm, reward);
        // FNV-1a over the chosen arm indices: cheap order-sensitive identity
        digest ^= arm.index() as u64;
        digest = digest.wrapping_mul(0x100000001b3);
        if t % opts.record_stride == 0 || t == horizon || opts.forced_records.contains(&t) {
            points.push(TrajectoryPoint { t, cum_regret: cum });
        }
        if let Some(s) = steps.as_mut() {
            s.push(StepRecord {
                t,
                arm,
                reward,
                oracle_arm,
                oracle_mean,
                chosen_mean,
                step_regret: r,
                cum_regret: cum,
            });
        }
    }

    Ok(EpisodeOutcome { points, final_regret: cum, choices_digest: digest, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{DriftEvent, RewardSupport};
    use crate::ingest::bernoulli_pools;
    use crate::policy::{PolicyKind, PolicySpec};
    use crate::rng::derive_rng;
    use std::sync::Arc;

    fn make_env(events: Vec<DriftEvent>, horizon: u64, label: &str) -> Environment {
        let pools = bernoulli_pools(&[0.9, 0.7, 0.5, 0.3, 0.1], 10).unwrap();
        Environment::new(
            Arc::new(pools),
            DriftSchedule::new(events, horizon).unwrap(),
            RewardSupport::BERNOULLI,
            horizon,
            derive_rng(11, label),
        )
        .unwrap()
    }

    fn run(env: &mut Environment, spec: &PolicySpec, keep: bool) -> EpisodeOutcome {
        let forced = forced_record_steps(env.schedule());
        let mut policy = spec
            .build(env.num_arms(), env.horizon(), env.schedule().num_changepoints())
            .unwrap();
        run_episode(
            env,
            policy.as_mut(),
            &EpisodeOptions {
                record_stride: 50,
                forced_records: &forced,
                keep_steps: keep,
                tape: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn cumulative_regret_is_monotone_and_summed_correctly() {
        let mut env = make_env(vec![DriftEvent::abrupt(200)], 500, "ep-1");
        let out = run(&mut env, &PolicySpec::new(PolicyKind::Ucb1), true);
        let steps = out.steps.unwrap();
        assert_eq!(steps.len(), 500);
        let mut acc = 0.0;
        for s in &steps {
            assert!(s.step_regret >= 0.0);
            acc += s.step_regret;
            assert_eq!(acc, s.cum_regret);
        }
        assert_eq!(acc, out.final_regret);
        for w in steps.windows(2) {
            assert!(w[1].cum_regret >= w[0].cum_regret);
        }
    }

    #[test]
    fn always_worst_policy_gets_gap_times_horizon() {
        // two fixed pools, no drift: forcing the worst arm every step after
        // its cold pull gives regret ~ gap * T
        struct AlwaysArm1;
        impl BanditPolicy for AlwaysArm1 {
            fn num_arms(&self) -> usize {
                2
            }
            fn select(&self) -> ArmId {
                ArmId(1)
            }
            fn update(&mut self, _arm: ArmId, _reward: f64) {}
        }
        let pools = bernoulli_pools(&[0.9, 0.1], 10).unwrap();
        let mut env = Environment::new(
            Arc::new(pools),
            DriftSchedule::stationary(),
            RewardSupport::BERNOULLI,
            1000,
            derive_rng(2, "ep-worst"),
        )
        .unwrap();
        let forced = BTreeSet::new();
        let mut p = AlwaysArm1;
        let out = run_episode(
            &mut env,
            &mut p,
            &EpisodeOptions {
                record_stride: 1000,
                forced_records: &forced,
                keep_steps: false,
                tape: None,
            },
        )
        .unwrap();
        let expected = 1000.0 * (0.9 - 0.1);
        assert!((out.final_regret - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn recording_covers_stride_boundaries_and_final() {
        let mut env = make_env(vec![DriftEvent::gradual(120, 33)], 500, "ep-2");
        let out = run(&mut env, &PolicySpec::new(PolicyKind::Ucb1), false);
        let ts: Vec<u64> = out.points.iter().map(|p| p.t).collect();
        assert!(ts.contains(&50));
        assert!(ts.contains(&120));
        assert!(ts.contains(&153));
        assert!(ts.contains(&500));
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn same_labels_reproduce_identical_episodes() {
        let mut spec = PolicySpec::new(PolicyKind::SlidingWindowUcb);
        spec.window = crate::policy::WindowChoice::Explicit(100);
        let mut a = make_env(vec![DriftEvent::abrupt(200)], 400, "ep-same");
        let mut b = make_env(vec![DriftEvent::abrupt(200)], 400, "ep-same");
        let ra = run(&mut a, &spec, false);
        let rb = run(&mut b, &spec, false);
        assert_eq!(ra.final_regret, rb.final_regret);
        assert_eq!(ra.choices_digest, rb.choices_digest);
        let mut c = make_env(vec![DriftEvent::abrupt(200)], 400, "ep-other");
        let rc = run(&mut c, &spec, false);
        assert_ne!(ra.choices_digest, rc.choices_digest);
    }

    #[test]
    fn tape_replay_gives_identical_rewards_to_all_policies() {
        let mut tape_env = make_env(vec![], 300, "tape-src");
        let tape = RewardTape::generate(&mut tape_env).unwrap();
        let forced = BTreeSet::new();
        let mut seen = Vec::new();
        for kind in [PolicyKind::Ucb1, PolicyKind::DiscountedUcb] {
            let mut spec = PolicySpec::new(kind);
            spec.gamma = 0.95;
            let mut env = make_env(vec![], 300, "tape-run");
            let mut policy = spec.build(5, 300, 0).unwrap();
            let out = run_episode(
                &mut env,
                policy.as_mut(),
                &EpisodeOptions {
                    record_stride: 300,
                    forced_records: &forced,
                    keep_steps: true,
                    tape: Some(&tape),
                },
            )
            .unwrap();
            seen.push(out.steps.unwrap());
        }
        // wherever both policies pulled the same arm at the same step, the
        // reward must be identical
        let mut shared = 0;
        for (a, b) in seen[0].iter().zip(&seen[1]) {
            if a.arm == b.arm {
                assert_eq!(a.reward, b.reward);
                shared += 1;
            }
        }
        assert!(shared > 0);
    }

    #[test]
    fn mismatched_arm_counts_are_rejected() {
        let mut env = make_env(vec![], 100, "ep-3");
        let mut policy = PolicySpec::new(PolicyKind::Ucb1).build(3, 100, 0).unwrap();
        let forced = BTreeSet::new();
        let r = run_episode(
            &mut env,
            policy.as_mut(),
            &EpisodeOptions {
                record_stride: 10,
                forced_records: &forced,
                keep_steps: false,
                tape: None,
            },
        );
        assert!(r.is_err());
    }

    #[test]
    fn used_environment_is_rejected() {
        let mut env = make_env(vec![], 100, "ep-4");
        env.advance_to(5);
        let mut policy = PolicySpec::new(PolicyKind::Ucb1).build(5, 100, 0).unwrap();
        let forced = BTreeSet::new();
        let r = run_episode(
            &mut env,
            policy.as_mut(),
            &EpisodeOptions {
                record_stride: 10,
                forced_records: &forced,
                keep_steps: false,
                tape: None,
            },
        );
        assert!(r.is_err());
    }
}
