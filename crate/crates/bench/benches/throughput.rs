use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use driftlab_core::env::{DriftEvent, DriftSchedule, Environment, RewardSupport};
use driftlab_core::experiment::{run_episode, EpisodeOptions};
use driftlab_core::ingest::{kmeans, ratings_pools, KMeansConfig};
use driftlab_core::policy::{Aggregation, PolicyKind, PolicySpec, WindowChoice};
use driftlab_core::rng::derive_rng;
use std::collections::BTreeSet;
use std::hint::black_box;
use std::sync::Arc;

const HORIZON: u64 = 10_000;

fn ml_env(label: &str) -> Environment {
    let means: Vec<f64> = (0..9).map(|i| 3.9 - 0.15 * i as f64).collect();
    let pools = Arc::new(ratings_pools(&means, 500).unwrap());
    let events = vec![
        DriftEvent::abrupt(3000),
        DriftEvent::abrupt(4500),
        DriftEvent::abrupt(6000),
        DriftEvent::abrupt(9000),
    ];
    Environment::new(
        pools,
        DriftSchedule::new(events, HORIZON).unwrap(),
        RewardSupport::RATINGS,
        HORIZON,
        derive_rng(9, label),
    )
    .unwrap()
}

fn policy_specs() -> Vec<PolicySpec> {
    let mut specs = Vec::new();
    for kind in [
        PolicyKind::Ucb1,
        PolicyKind::DiscountedUcb,
        PolicyKind::SlidingWindowUcb,
        PolicyKind::DualViewUcb(Aggregation::Mean),
    ] {
        let mut spec = PolicySpec::new(kind);
        spec.window = WindowChoice::Explicit(625);
        specs.push(spec);
    }
    specs
}

fn bench_select_update(c: &mut Criterion) {
    let mut group = c.benchmark_group("select_update");
    group.throughput(Throughput::Elements(1));
    for spec in policy_specs() {
        group.bench_function(spec.id(), |b| {
            let mut policy = spec.build(9, HORIZON, 4).unwrap();
            // warm past the cold start so the steady-state path is measured
            for i in 0..9 {
                let arm = policy.select();
                policy.update(arm, 2.7 + 0.1 * i as f64);
            }
            b.iter(|| {
                let arm = policy.select();
                policy.update(arm, black_box(3.0));
                black_box(arm)
            });
        });
    }
    group.finish();
}

fn bench_episode(c: &mut Criterion) {
    let mut group = c.benchmark_group("episode");
    group.throughput(Throughput::Elements(HORIZON));
    group.sample_size(20);
    for spec in policy_specs() {
        group.bench_function(spec.id(), |b| {
            b.iter(|| {
                let mut env = ml_env("bench/episode");
                let mut policy = spec.build(9, HORIZON, 4).unwrap();
                let forced = BTreeSet::new();
                let opts = EpisodeOptions {
                    record_stride: 100,
                    forced_records: &forced,
                    keep_steps: false,
                    tape: None,
                };
                black_box(run_episode(&mut env, policy.as_mut(), &opts).unwrap())
            });
        });
    }
    group.finish();
}

fn bench_kmeans(c: &mut Criterion) {
    use rand::Rng;
    let mut rng = derive_rng(9, "bench/kmeans");
    let centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]];
    let mut cloud = Vec::new();
    for center in &centers {
        for _ in 0..50 {
            cloud.push(vec![
                center[0] + rng.gen_range(-1.5..1.5),
                center[1] + rng.gen_range(-1.5..1.5),
            ]);
        }
    }
    let mut group = c.benchmark_group("kmeans");
    group.throughput(Throughput::Elements(cloud.len() as u64));
    for restarts in [1usize, 10] {
        group.bench_function(format!("k4_restarts{restarts}"), |b| {
            let cfg = KMeansConfig { max_iters: 300, restarts, seed: 9 };
            b.iter(|| black_box(kmeans(&cloud, 4, &cfg).unwrap()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_select_update, bench_episode, bench_kmeans);
criterion_main!(benches);
