//! The scenario matrix: datasets crossed with drift dynamics, each running
//! every configured policy over several seeded episodes.

use super::aggregate::{aggregate_runs, RunSummary};
use super::episode::{
    forced_record_steps, run_episode, EpisodeOptions, RewardTape, Trajectory,
};
use crate::env::{DriftEvent, DriftSchedule, Environment, RewardPool, RewardSupport};
use crate::error::Error;
use crate::policy::{Aggregation, PolicyKind, PolicySpec, WindowChoice};
use crate::rng::{derive_rng, seed_fingerprint};
use crate::Result;
use rayon::prelude::*;
use std::sync::Arc;

/// Drift regime of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dynamics {
    Stationary,
    Abrupt,
    Gradual,
}

impl Dynamics {
    pub fn id(self) -> &'static str {
        match self {
            Dynamics::Stationary => "stationary",
            Dynamics::Abrupt => "abrupt",
            Dynamics::Gradual => "gradual",
        }
    }

    pub fn all() -> [Dynamics; 3] {
        [Dynamics::Stationary, Dynamics::Abrupt, Dynamics::Gradual]
    }

    pub fn from_id(id: &str) -> Result<Dynamics> {
        match id {
            "stationary" => Ok(Dynamics::Stationary),
            "abrupt" => Ok(Dynamics::Abrupt),
            "gradual" => Ok(Dynamics::Gradual),
            other => Err(Error::config(format!(
                "unknown dynamics '{other}' (expected stationary, abrupt, or gradual)"
            ))),
        }
    }
}

/// Where a scenario's changepoints sit, before crossing with a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleTemplate {
    pub abrupt_changepoints: Vec<u64>,
    pub gradual_starts: Vec<u64>,
    pub gradual_duration: u64,
}

/// Reference layout: horizon 100k steps, abrupt changes at 30k/45k/60k/90k,
/// gradual windows of 10k steps starting at 30k and 60k.
pub const FULL_HORIZON: u64 = 100_000;
pub const FULL_ABRUPT: [u64; 4] = [30_000, 45_000, 60_000, 90_000];
pub const FULL_GRADUAL_STARTS: [u64; 2] = [30_000, 60_000];
pub const FULL_GRADUAL_DURATION: u64 = 10_000;

/// The reference layout shrunk by `scale`, keeping all ratios (so the window
/// heuristic resolves to proportionally scaled windows).
pub fn scaled_layout(scale: f64) -> Result<(u64, ScheduleTemplate)> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::config(format!("scale must be positive, got {scale}")));
    }
    let s = |x: u64| (x as f64 * scale).round() as u64;
    let horizon = s(FULL_HORIZON);
    let template = ScheduleTemplate {
        abrupt_changepoints: FULL_ABRUPT.iter().map(|&x| s(x)).collect(),
        gradual_starts: FULL_GRADUAL_STARTS.iter().map(|&x| s(x)).collect(),
        gradual_duration: s(FULL_GRADUAL_DURATION),
    };
    if horizon == 0 || template.gradual_duration == 0 {
        return Err(Error::config(format!("scale {scale} collapses the layout to zero steps")));
    }
    Ok((horizon, template))
}

impl ScheduleTemplate {
    /// Concrete schedule for one dynamics regime.
    pub fn schedule(&self, dynamics: Dynamics, horizon: u64) -> Result<DriftSchedule> {
        let events = match dynamics {
            Dynamics::Stationary => Vec::new(),
            Dynamics::Abrupt => self
                .abrupt_changepoints
                .iter()
                .map(|&c| DriftEvent::abrupt(c))
                .collect(),
            Dynamics::Gradual => self
                .gradual_starts
                .iter()
                .map(|&s| DriftEvent::gradual(s, self.gradual_duration))
                .collect(),
        };
        DriftSchedule::new(events, horizon)
    }
}

/// One arm set: a named collection of reward pools sharing a support.
#[derive(Debug, Clone)]
pub struct DatasetSpec {
    pub id: String,
    pub pools: Arc<Vec<RewardPool>>,
    pub support: RewardSupport,
}

/// One cell of the matrix: a dataset under a drift regime.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub dataset: String,
    pub dynamics: Dynamics,
    pub horizon: u64,
    pub schedule: DriftSchedule,
    pub support: RewardSupport,
}

/// Everything needed to run the full experiment.
#[derive(Debug, Clone)]
pub struct MatrixOptions {
    pub datasets: Vec<DatasetSpec>,
    pub dynamics: Vec<Dynamics>,
    pub policies: Vec<PolicyKind>,
    pub horizon: u64,
    pub template: ScheduleTemplate,
    pub alpha: f64,
    pub gamma: f64,
    pub window_c: f64,
    /// Explicit window for drifting scenarios; the heuristic applies when
    /// unset.
    pub window_tau: Option<u64>,
    /// Window for stationary scenarios; defaults to the horizon.
    pub stationary_tau: Option<u64>,
    pub fdsw_discounted_alpha: Option<f64>,
    pub fdsw_windowed_alpha: Option<f64>,
    pub num_runs: u32,
    pub base_seed: u64,
    pub record_stride: u64,
    /// Replay all policies of a (scenario, run) pair against one shared
    /// pre-sampled reward tape instead of independent streams.
    pub shared_tape: bool,
    /// Keep full per-step records on every trajectory.
    pub keep_steps: bool,
    pub parallel: bool,
}

/// The six policies of the standard comparison, in report order.
pub fn default_policy_kinds() -> Vec<PolicyKind> {
    vec![
        PolicyKind::Ucb1,
        PolicyKind::DiscountedUcb,
        PolicyKind::SlidingWindowUcb,
        PolicyKind::DualViewUcb(Aggregation::Min),
        PolicyKind::DualViewUcb(Aggregation::Mean),
        PolicyKind::DualViewUcb(Aggregation::Max),
    ]
}

impl MatrixOptions {
    /// Desk defaults: the reference layout at 1/10 scale, three runs per
    /// configuration, all dynamics, all six policies.
    pub fn desk(datasets: Vec<DatasetSpec>) -> Self {
        let (horizon, template) = scaled_layout(0.1).expect("fixed scale is valid");
        MatrixOptions {
            datasets,
            dynamics: Dynamics::all().to_vec(),
            policies: default_policy_kinds(),
            horizon,
            template,
            alpha: 1.0,
            gamma: 0.999,
            window_c: 0.25,
            window_tau: None,
            stationary_tau: Some(1000),
            fdsw_discounted_alpha: Some(0.1),
            fdsw_windowed_alpha: Some(0.5),
            num_runs: 3,
            base_seed: 42,
            record_stride: 100,
            shared_tape: false,
            keep_steps: false,
            parallel: true,
        }
    }

    /// Policy spec for one dynamics regime: stationary scenarios pin the
    /// window explicitly (default: the whole horizon), drifting ones use the
    /// heuristic.
    pub fn policy_spec(&self, kind: PolicyKind, dynamics: Dynamics) -> PolicySpec {
        let mut spec = PolicySpec::new(kind);
        spec.alpha = self.alpha;
        spec.gamma = self.gamma;
        spec.window = match dynamics {
            Dynamics::Stationary => {
                WindowChoice::Explicit(self.stationary_tau.unwrap_or(self.horizon))
            }
            _ => match self.window_tau {
                Some(tau) => WindowChoice::Explicit(tau),
                None => WindowChoice::Heuristic { c: self.window_c },
            },
        };
        spec.discounted_alpha = self.fdsw_discounted_alpha;
        spec.windowed_alpha = self.fdsw_windowed_alpha;
        spec
    }

    fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.dynamics.is_empty() || self.policies.is_empty() {
            return Err(Error::config("matrix needs datasets, dynamics, and policies"));
        }
        if self.num_runs == 0 {
            return Err(Error::config("matrix needs at least one run"));
        }
        if self.record_stride == 0 {
            return Err(Error::config("record stride must be at least 1"));
        }
        let mut seen = Vec::new();
        for d in &self.datasets {
            if seen.contains(&&d.id) {
                return Err(Error::config(format!("duplicate dataset id '{}'", d.id)));
            }
            seen.push(&d.id);
        }
        Ok(())
    }
}

/// Expand the matrix options into concrete scenarios (dataset-major order).
pub fn build_scenarios(opts: &MatrixOptions) -> Result<Vec<ScenarioConfig>> {
    opts.validate()?;
    let mut out = Vec::new();
    for ds in &opts.datasets {
        for &dyn_ in &opts.dynamics {
            let schedule = opts.template.schedule(dyn_, opts.horizon)?;
            out.push(ScenarioConfig {
                name: format!("{}-{}", ds.id, dyn_.id()),
                dataset: ds.id.clone(),
                dynamics: dyn_,
                horizon: opts.horizon,
                schedule,
                support: ds.support,
            });
        }
    }
    Ok(out)
}

/// Stream label for one episode's environment.
pub fn episode_label(scenario: &str, policy_id: &str, run: u32) -> String {
    format!("env/{scenario}/{policy_id}/{run}")
}

/// Stream label for one (scenario, run) shared reward tape.
pub fn tape_label(scenario: &str, run: u32) -> String {
    format!("tape/{scenario}/{run}")
}

/// Build the environment for one episode.
pub fn build_environment(
    scenario: &ScenarioConfig,
    pools: &Arc<Vec<RewardPool>>,
    base_seed: u64,
    label: &str,
) -> Result<Environment> {
    Environment::new(
        Arc::clone(pools),
        scenario.schedule.clone(),
        scenario.support,
        scenario.horizon,
        derive_rng(base_seed, label),
    )
}

#[derive(Debug, Clone)]
pub struct PolicyResult {
    pub policy_id: String,
    pub display_name: String,
    pub spec: PolicySpec,
    pub trajectories: Vec<Trajectory>,
    pub summary: RunSummary,
    pub final_mean: f64,
    pub final_std: f64,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub policies: Vec<PolicyResult>,
}

/// One derived stream, recorded for the seed manifest.
#[derive(Debug, Clone)]
pub struct SeedRecord {
    pub scenario: String,
    pub policy: String,
    pub run: u32,
    pub label: String,
    pub fingerprint: u64,
}

#[derive(Debug, Clone)]
pub struct MatrixResult {
    pub scenarios: Vec<ScenarioResult>,
    pub seeds: Vec<SeedRecord>,
}

struct EpisodeTask {
    scenario_idx: usize,
    policy_idx: usize,
    run: u32,
}

fn run_one(
    opts: &MatrixOptions,
    scenarios: &[ScenarioConfig],
    pools_by_scenario: &[Arc<Vec<RewardPool>>],
    tapes: &[Vec<Arc<RewardTape>>],
    task: &EpisodeTask,
) -> Result<Trajectory> {
    let scenario = &scenarios[task.scenario_idx];
    let spec = opts.policy_spec(opts.policies[task.policy_idx], scenario.dynamics);
    let policy_id = spec.id();
    let label = episode_label(&scenario.name, &policy_id, task.run);
    let mut env = build_environment(
        scenario,
        &pools_by_scenario[task.scenario_idx],
        opts.base_seed,
        &label,
    )?;
    let mut policy = spec.build(
        env.num_arms(),
        scenario.horizon,
        scenario.schedule.num_changepoints(),
    )?;
    let forced = forced_record_steps(&scenario.schedule);
    let tape = opts
        .shared_tape
        .then(|| tapes[task.scenario_idx][task.run as usize].as_ref());
    let outcome = run_episode(
        &mut env,
        policy.as_mut(),
        &EpisodeOptions {
            record_stride: opts.record_stride,
            forced_records: &forced,
            keep_steps: opts.keep_steps,
            tape,
        },
    )?;
    Ok(Trajectory {
        scenario: scenario.name.clone(),
        policy_id,
        run_index: task.run,
        points: outcome.points,
        final_regret: outcome.final_regret,
        choices_digest: outcome.choices_digest,
        steps: outcome.steps,
    })
}

/// Run every (dataset, dynamics, policy, run) episode and aggregate. Output
/// ordering and content are fully determined by the options.
pub fn run_matrix(opts: &MatrixOptions) -> Result<MatrixResult> {
    let scenarios = build_scenarios(opts)?;
    let pools_by_scenario: Vec<Arc<Vec<RewardPool>>> = scenarios
        .iter()
        .map(|s| {
            let ds = opts
                .datasets
                .iter()
                .find(|d| d.id == s.dataset)
                .expect("scenario built from known dataset");
            Arc::clone(&ds.pools)
        })
        .collect();

    let mut seeds = Vec::new();

    // shared tapes per (scenario, run), generated up front
    let mut tapes: Vec<Vec<Arc<RewardTape>>> = Vec::new();
    if opts.shared_tape {
        for (si, s) in scenarios.iter().enumerate() {
            let mut per_run = Vec::new();
            for run in 0..opts.num_runs {
                let label = tape_label(&s.name, run);
                let mut env =
                    build_environment(s, &pools_by_scenario[si], opts.base_seed, &label)?;
                per_run.push(Arc::new(RewardTape::generate(&mut env)?));
                seeds.push(SeedRecord {
                    scenario: s.name.clone(),
                    policy: "(tape)".into(),
                    run,
                    label: label.clone(),
                    fingerprint: seed_fingerprint(opts.base_seed, &label),
                });
            }
            tapes.push(per_run);
        }
    }

    let mut tasks = Vec::new();
    for si in 0..scenarios.len() {
        for pi in 0..opts.policies.len() {
            for run in 0..opts.num_runs {
                tasks.push(EpisodeTask { scenario_idx: si, policy_idx: pi, run });
            }
        }
    }

    let trajectories: Vec<Result<Trajectory>> = if opts.parallel {
        tasks
            .par_iter()
            .map(|t| run_one(opts, &scenarios, &pools_by_scenario, &tapes, t))
            .collect()
    } else {
        tasks
            .iter()
            .map(|t| run_one(opts, &scenarios, &pools_by_scenario, &tapes, t))
            .collect()
    };
    let mut trajectories = trajectories.into_iter().collect::<Result<Vec<_>>>()?;

    for task in &tasks {
        let scenario = &scenarios[task.scenario_idx];
        let spec = opts.policy_spec(opts.policies[task.policy_idx], scenario.dynamics);
        let label = episode_label(&scenario.name, &spec.id(), task.run);
        seeds.push(SeedRecord {
            scenario: scenario.name.clone(),
            policy: spec.id(),
            run: task.run,
            label: label.clone(),
            fingerprint: seed_fingerprint(opts.base_seed, &label),
        });
    }

    // group trajectories back into (scenario, policy) blocks; tasks were
    // generated scenario-major, policy-next, run-minor
    let mut results = Vec::new();
    let runs = opts.num_runs as usize;
    for (si, scenario) in scenarios.iter().enumerate() {
        let mut policies = Vec::new();
        for (pi, &kind) in opts.policies.iter().enumerate() {
            let start = (si * opts.policies.len() + pi) * runs;
            let block: Vec<Trajectory> = trajectories[start..start + runs].to_vec();
            let spec = opts.policy_spec(kind, scenario.dynamics);
            let summary = aggregate_runs(&block)?;
            let finals: Vec<f64> = block.iter().map(|t| t.final_regret).collect();
            let (final_mean, final_std) = super::aggregate::mean_std(&finals);
            policies.push(PolicyResult {
                policy_id: spec.id(),
                display_name: spec.display_name(),
                spec,
                trajectories: block,
                summary,
                final_mean,
                final_std,
            });
        }
        results.push(ScenarioResult { config: scenario.clone(), policies });
    }
    trajectories.clear();

    Ok(MatrixResult { scenarios: results, seeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::bernoulli_pools;

    fn tiny_dataset() -> DatasetSpec {
        DatasetSpec {
            id: "toy".into(),
            pools: Arc::new(bernoulli_pools(&[0.9, 0.7, 0.5, 0.3, 0.1], 10).unwrap()),
            support: RewardSupport::BERNOULLI,
        }
    }

    fn tiny_options() -> MatrixOptions {
        let mut opts = MatrixOptions::desk(vec![tiny_dataset()]);
        opts.horizon = 400;
        opts.template = ScheduleTemplate {
            abrupt_changepoints: vec![120, 180, 240, 360],
            gradual_starts: vec![120, 240],
            gradual_duration: 40,
        };
        opts.num_runs = 2;
        opts.record_stride = 50;
        opts.gamma = 0.95;
        opts.stationary_tau = None;
        opts
    }

    #[test]
    fn scaled_layout_reference_points() {
        let (horizon, t) = scaled_layout(0.1).unwrap();
        assert_eq!(horizon, 10_000);
        assert_eq!(t.abrupt_changepoints, vec![3_000, 4_500, 6_000, 9_000]);
        assert_eq!(t.gradual_starts, vec![3_000, 6_000]);
        assert_eq!(t.gradual_duration, 1_000);
        let (h2, t2) = scaled_layout(1.0).unwrap();
        assert_eq!(h2, 100_000);
        assert_eq!(t2.abrupt_changepoints, vec![30_000, 45_000, 60_000, 90_000]);
        assert!(scaled_layout(0.0).is_err());
    }

    #[test]
    fn scenarios_cross_datasets_and_dynamics() {
        let opts = tiny_options();
        let scenarios = build_scenarios(&opts).unwrap();
        assert_eq!(scenarios.len(), 3);
        assert_eq!(scenarios[0].name, "toy-stationary");
        assert!(scenarios[0].schedule.is_empty());
        assert_eq!(scenarios[1].name, "toy-abrupt");
        assert_eq!(scenarios[1].schedule.events().len(), 4);
        assert_eq!(scenarios[2].name, "toy-gradual");
        assert_eq!(scenarios[2].schedule.events().len(), 2);
    }

    #[test]
    fn stationary_windows_default_to_horizon() {
        let opts = tiny_options();
        let spec = opts.policy_spec(PolicyKind::SlidingWindowUcb, Dynamics::Stationary);
        assert_eq!(spec.window, WindowChoice::Explicit(400));
        let spec = opts.policy_spec(PolicyKind::SlidingWindowUcb, Dynamics::Abrupt);
        assert_eq!(spec.window, WindowChoice::Heuristic { c: 0.25 });
        let mut pinned = tiny_options();
        pinned.stationary_tau = Some(64);
        let spec = pinned.policy_spec(PolicyKind::SlidingWindowUcb, Dynamics::Stationary);
        assert_eq!(spec.window, WindowChoice::Explicit(64));
    }

    #[test]
    fn matrix_runs_and_aggregates() {
        let opts = tiny_options();
        let result = run_matrix(&opts).unwrap();
        assert_eq!(result.scenarios.len(), 3);
        for s in &result.scenarios {
            assert_eq!(s.policies.len(), 6);
            for p in &s.policies {
                assert_eq!(p.trajectories.len(), 2);
                assert_eq!(p.summary.runs, 2);
                assert!(p.final_mean.is_finite());
                assert!(p.final_std.is_finite());
                assert_eq!(p.summary.ts.last().copied(), Some(400));
            }
        }
        // episode labels make every (policy, run) stream distinct
        assert_eq!(result.seeds.len(), 3 * 6 * 2);
    }

    #[test]
    fn matrix_is_deterministic_and_seed_sensitive() {
        let opts = tiny_options();
        let a = run_matrix(&opts).unwrap();
        let b = run_matrix(&opts).unwrap();
        let finals = |m: &MatrixResult| -> Vec<f64> {
            m.scenarios
                .iter()
                .flat_map(|s| s.policies.iter().map(|p| p.final_mean))
                .collect()
        };
        assert_eq!(finals(&a), finals(&b));
        let mut opts2 = tiny_options();
        opts2.base_seed = 43;
        let c = run_matrix(&opts2).unwrap();
        assert_ne!(finals(&a), finals(&c));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut opts = tiny_options();
        opts.parallel = false;
        let serial = run_matrix(&opts).unwrap();
        opts.parallel = true;
        let parallel = run_matrix(&opts).unwrap();
        let digests = |m: &MatrixResult| -> Vec<u64> {
            m.scenarios
                .iter()
                .flat_map(|s| {
                    s.policies
                        .iter()
                        .flat_map(|p| p.trajectories.iter().map(|t| t.choices_digest))
                })
                .collect()
        };
        assert_eq!(digests(&serial), digests(&parallel));
    }

    #[test]
    fn shared_tape_mode_runs() {
        let mut opts = tiny_options();
        opts.shared_tape = true;
        let result = run_matrix(&opts).unwrap();
        // tape seeds recorded alongside episode seeds
        let tape_seeds = result.seeds.iter().filter(|s| s.policy == "(tape)").count();
        assert_eq!(tape_seeds, 3 * 2);
    }

    #[test]
    fn rejects_degenerate_options() {
        let mut opts = tiny_options();
        opts.num_runs = 0;
        assert!(run_matrix(&opts).is_err());
        let mut opts = tiny_options();
        opts.policies.clear();
        assert!(run_matrix(&opts).is_err());
        let mut opts = tiny_options();
        opts.datasets.push(tiny_dataset());
        assert!(run_matrix(&opts).is_err());
    }
}
