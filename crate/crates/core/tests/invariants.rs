//! Property tests for the structural invariants of the policies, the drift
//! machinery, and episode accounting.

use driftlab_core::env::{
    gradual_lambda, swap_pairs, DriftEvent, DriftSchedule, Environment, RewardSupport,
};
use driftlab_core::experiment::{forced_record_steps, run_episode, EpisodeOptions, RewardTape};
use driftlab_core::ingest::bernoulli_pools;
use driftlab_core::policy::{
    aggregate, ucb1_score, Aggregation, ArmId, DiscountedState, PolicyKind, PolicySpec,
    WindowChoice, WindowState,
};
use driftlab_core::rng::derive_rng;
use proptest::collection::vec;
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::Arc;

const REL_TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= REL_TOL * scale
}

proptest! {
    #[test]
    fn aggregation_is_sandwiched(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        let lo = aggregate(Aggregation::Min, x, y);
        let mid = aggregate(Aggregation::Mean, x, y);
        let hi = aggregate(Aggregation::Max, x, y);
        prop_assert!(lo <= mid && mid <= hi);
        prop_assert_eq!(lo, x.min(y));
        prop_assert_eq!(hi, x.max(y));
    }

    #[test]
    fn aggregation_of_equal_views_is_identity(x in -1e6f64..1e6) {
        for f in Aggregation::all() {
            prop_assert_eq!(aggregate(f, x, x).to_bits(), x.to_bits());
        }
    }

    #[test]
    fn ucb_score_shifts_with_the_mean(
        mean in 0.0f64..1.0,
        shift in 0.0f64..10.0,
        pulls in 1u64..10_000,
        rounds_extra in 0u64..10_000,
        alpha in 0.1f64..4.0,
    ) {
        let rounds = pulls + rounds_extra;
        let base = ucb1_score(mean, pulls, rounds, alpha);
        let shifted = ucb1_score(mean + shift, pulls, rounds, alpha);
        prop_assert!(close(shifted, base + shift), "{shifted} vs {}", base + shift);
    }

    #[test]
    fn discounted_counts_respect_geometric_ceiling(
        gamma in 0.5f64..0.999,
        choices in vec(0usize..4, 1..400),
        rewards in vec(0.0f64..1.0, 400),
    ) {
        let mut state = DiscountedState::new(4, gamma);
        let cap = 1.0 / (1.0 - gamma);
        for (i, &c) in choices.iter().enumerate() {
            state.update(ArmId(c), rewards[i]);
            for arm in 0..4 {
                let n = state.count(ArmId(arm));
                prop_assert!(n >= 0.0);
                prop_assert!(n < cap + REL_TOL, "count {n} over ceiling {cap}");
            }
        }
    }

    #[test]
    fn discounted_total_follows_recurrence(
        gamma in 0.5f64..1.0,
        choices in vec(0usize..5, 1..200),
    ) {
        let mut state = DiscountedState::new(5, gamma);
        let mut expected = 0.0f64;
        for &c in &choices {
            state.update(ArmId(c), 0.5);
            expected = gamma * expected + 1.0;
            let total = state.total_count();
            prop_assert!(close(total, expected), "total {total} vs {expected}");
        }
    }

    #[test]
    fn windows_never_exceed_capacity(
        tau in 1usize..50,
        pushes in vec((0usize..3, 0.0f64..1.0), 1..300),
    ) {
        let mut state = WindowState::new(3, tau);
        for &(arm, r) in &pushes {
            state.push(ArmId(arm), r);
            let mut total = 0;
            for a in 0..3 {
                let len = state.len(ArmId(a));
                prop_assert!(len <= tau);
                total += len;
            }
            prop_assert_eq!(total, state.total_len());
        }
        for a in 0..3 {
            let arm = ArmId(a);
            if !state.is_empty(arm) {
                prop_assert!(close(state.mean(arm), state.recomputed_mean(arm)));
            }
        }
    }

    #[test]
    fn swap_pairs_link_extremes(means in vec(0.0f64..1.0, 4..9)) {
        let pairs = swap_pairs(&means).unwrap();
        prop_assert_eq!(pairs.len(), 2);
        let ids: BTreeSet<usize> =
            pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        prop_assert_eq!(ids.len(), 4, "pairs share an index: {:?}", pairs);
        let max = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = means.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(means[pairs[0].0], max);
        prop_assert_eq!(means[pairs[0].1], min);
        let rest: Vec<f64> = (0..means.len())
            .filter(|i| *i != pairs[0].0 && *i != pairs[0].1)
            .map(|i| means[i])
            .collect();
        let max2 = rest.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min2 = rest.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(means[pairs[1].0], max2);
        prop_assert_eq!(means[pairs[1].1], min2);
    }

    #[test]
    fn lambda_ramps_monotonically(start in 1u64..1000, duration in 1u64..500) {
        prop_assert_eq!(gradual_lambda(start, start, duration), 0.0);
        prop_assert_eq!(gradual_lambda(start + duration, start, duration), 1.0);
        let mut prev = -1.0;
        for t in start..=start + duration {
            let lambda = gradual_lambda(t, start, duration);
            prop_assert!((0.0..=1.0).contains(&lambda));
            prop_assert!(lambda >= prev);
            prev = lambda;
        }
    }
}

fn episode_env(seed: u64, label: &str, horizon: u64, with_drift: bool) -> Environment {
    let pools = bernoulli_pools(&[0.8, 0.6, 0.4, 0.2], 10).unwrap();
    let events = if with_drift {
        vec![
            DriftEvent::abrupt(horizon / 3),
            DriftEvent::gradual(horizon / 2, horizon / 5),
        ]
    } else {
        Vec::new()
    };
    Environment::new(
        Arc::new(pools),
        DriftSchedule::new(events, horizon).unwrap(),
        RewardSupport::BERNOULLI,
        horizon,
        derive_rng(seed, label),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cumulative_regret_is_monotone(seed in 0u64..5000, with_drift in any::<bool>()) {
        let horizon = 300;
        let mut env = episode_env(seed, "prop/monotone", horizon, with_drift);
        let forced = forced_record_steps(env.schedule());
        let mut policy = PolicySpec::new(PolicyKind::Ucb1)
            .build(4, horizon, env.schedule().num_changepoints())
            .unwrap();
        let opts = EpisodeOptions {
            record_stride: 7,
            forced_records: &forced,
            keep_steps: false,
            tape: None,
        };
        let out = run_episode(&mut env, policy.as_mut(), &opts).unwrap();
        let mut prev = 0.0;
        for p in &out.points {
            prop_assert!(p.cum_regret >= prev, "regret dropped at t={}", p.t);
            prev = p.cum_regret;
        }
        prop_assert_eq!(out.points.last().unwrap().cum_regret.to_bits(),
            out.final_regret.to_bits());
    }

    #[test]
    fn identical_labels_reproduce_bitwise(seed in 0u64..5000) {
        let run = || {
            let mut env = episode_env(seed, "prop/repro", 250, true);
            let forced = forced_record_steps(env.schedule());
            let mut policy = PolicySpec::new(PolicyKind::DiscountedUcb)
                .build(4, 250, env.schedule().num_changepoints())
                .unwrap();
            let opts = EpisodeOptions {
                record_stride: 10,
                forced_records: &forced,
                keep_steps: false,
                tape: None,
            };
            run_episode(&mut env, policy.as_mut(), &opts).unwrap()
        };
        let a = run();
        let b = run();
        prop_assert_eq!(a.choices_digest, b.choices_digest);
        prop_assert_eq!(a.final_regret.to_bits(), b.final_regret.to_bits());
        for (pa, pb) in a.points.iter().zip(&b.points) {
            prop_assert_eq!(pa.cum_regret.to_bits(), pb.cum_regret.to_bits());
        }
    }

    #[test]
    fn degenerate_parameters_collapse_to_ucb1(seed in 0u64..5000) {
        let horizon = 240u64;
        let mut specs = vec![PolicySpec::new(PolicyKind::Ucb1)];
        let mut ducb = PolicySpec::new(PolicyKind::DiscountedUcb);
        ducb.gamma = 1.0;
        specs.push(ducb);
        let mut sw = PolicySpec::new(PolicyKind::SlidingWindowUcb);
        sw.window = WindowChoice::Explicit(horizon);
        specs.push(sw);
        for f in Aggregation::all() {
            let mut dual = PolicySpec::new(PolicyKind::DualViewUcb(f));
            dual.gamma = 1.0;
            dual.window = WindowChoice::Explicit(horizon);
            specs.push(dual);
        }

        let mut tape_env = episode_env(seed, "prop/tape", horizon, false);
        let tape = RewardTape::generate(&mut tape_env).unwrap();
        let forced = BTreeSet::new();
        let mut digests = Vec::new();
        for spec in &specs {
            let mut env = episode_env(seed, "prop/degenerate", horizon, false);
            let mut policy = spec.build(4, horizon, 0).unwrap();
            let opts = EpisodeOptions {
                record_stride: horizon,
                forced_records: &forced,
                keep_steps: false,
                tape: Some(&tape),
            };
            let out = run_episode(&mut env, policy.as_mut(), &opts).unwrap();
            digests.push((spec.id(), out.choices_digest, out.final_regret.to_bits()));
        }
        let (_, base_digest, base_bits) = digests[0];
        for (id, digest, bits) in &digests[1..] {
            prop_assert_eq!(*digest, base_digest, "{} diverged from ucb1", id);
            prop_assert_eq!(*bits, base_bits, "{} regret diverged from ucb1", id);
        }
    }
}
