//! Episode execution, cross-run aggregation, regret analysis, the scenario
//! matrix, and deterministic output writers.

pub mod aggregate;
pub mod analysis;
pub mod episode;
pub mod matrix;
pub mod report;

pub use aggregate::{aggregate_runs, mean_std, RunSummary};
pub use analysis::{mean_step_regret, phase_bounds, staircase_check, PhaseCheck, StaircaseReport};
pub use episode::{
    forced_record_steps, run_episode, EpisodeOptions, EpisodeOutcome, RewardTape, StepRecord,
    Trajectory, TrajectoryPoint,
};
pub use matrix::{
    build_environment, build_scenarios, default_policy_kinds, run_matrix, scaled_layout,
    DatasetSpec, Dynamics, MatrixOptions, MatrixResult, PolicyResult, ScenarioConfig,
    ScenarioResult, ScheduleTemplate, SeedRecord,
};
pub use report::{
    format_cell, read_curves, read_summary, scenario_series, write_curves, write_mean_samples,
    write_plot_table, write_report_text, write_seeds, write_summary, write_trajectory,
    CurveSeries, SummaryRow,
};
