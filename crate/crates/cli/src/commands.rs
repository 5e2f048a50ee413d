//! The four subcommands. Each writes deterministic delimited-text outputs
//! into the chosen directory; `run`, `cluster`, and `validate-drift` also
//! drop a resolved-config copy there for provenance.

use crate::config::{config_toml, io_at, read_movielens, resolve, Config, Resolved};
use driftlab_core::env::{mean_trajectories, validate_drift};
use driftlab_core::experiment::{
    build_environment, build_scenarios, read_curves, read_summary, run_matrix, write_curves,
    write_mean_samples, write_plot_table, write_report_text, write_seeds, write_summary,
    write_trajectory, MatrixResult,
};
use driftlab_core::ingest::{encode_users, kmeans, sse_curve, KMeansConfig};
use driftlab_core::{Error, Result};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

fn write_file(path: &Path, emit: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    emit(&mut buf)?;
    fs::write(path, &buf).map_err(|e| io_at(path, e))
}

fn write_provenance(resolved_config: &Config, out_dir: &Path) -> Result<()> {
    let text = config_toml(resolved_config)?;
    let path = out_dir.join("resolved_config.toml");
    fs::write(&path, text).map_err(|e| io_at(&path, e))
}

fn ensure_dir(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| io_at(out_dir, e))
}

fn write_arm_tables(resolved: &Resolved, out_dir: &Path) -> Result<()> {
    for ds in &resolved.options.datasets {
        let labels = &resolved.arm_labels[&ds.id];
        let path = out_dir.join(format!("arms_{}.csv", ds.id));
        write_file(&path, |w| {
            writeln!(w, "arm_id,source,pool_size,pool_mean")?;
            for (i, pool) in ds.pools.iter().enumerate() {
                writeln!(w, "{i},{},{},{}", labels[i], pool.len(), pool.mean())?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// Execute the full scenario matrix and write curves, summary, seeds, arm
/// metadata, and (optionally) per-step trajectories.
pub fn cmd_run(config: &Config, out_dir: &Path) -> Result<MatrixResult> {
    let resolved = resolve(config)?;
    ensure_dir(out_dir)?;
    write_provenance(&resolved.provenance, out_dir)?;
    write_arm_tables(&resolved, out_dir)?;

    let result = run_matrix(&resolved.options)?;

    write_file(&out_dir.join("summary.csv"), |w| write_summary(w, &result))?;
    write_file(&out_dir.join("seeds.csv"), |w| write_seeds(w, &result.seeds))?;
    for scenario in &result.scenarios {
        let path = out_dir.join(format!("curves_{}.csv", scenario.config.name));
        write_file(&path, |w| write_curves(w, scenario))?;
        if resolved.options.keep_steps {
            for policy in &scenario.policies {
                for traj in &policy.trajectories {
                    let path = out_dir.join(format!(
                        "trajectory_{}_{}_run{}.csv",
                        scenario.config.name, policy.policy_id, traj.run_index
                    ));
                    write_file(&path, |w| write_trajectory(w, traj))?;
                }
            }
        }
    }
    Ok(result)
}

/// Analytically re-derive every scenario's true-mean evolution, export the
/// trajectories, and fail on the first deviation.
pub fn cmd_validate_drift(config: &Config, out_dir: &Path) -> Result<()> {
    let resolved = resolve(config)?;
    ensure_dir(out_dir)?;
    write_provenance(&resolved.provenance, out_dir)?;

    let scenarios = build_scenarios(&resolved.options)?;
    let pools: std::collections::BTreeMap<&str, _> = resolved
        .options
        .datasets
        .iter()
        .map(|d| (d.id.as_str(), &d.pools))
        .collect();
    let mut failures = Vec::new();
    for scenario in &scenarios {
        let label = format!("validate/{}", scenario.name);
        let pool = pools[scenario.dataset.as_str()];
        let mut env =
            build_environment(scenario, pool, resolved.options.base_seed, &label)?;
        let report = validate_drift(&mut env)?;

        let mut env = build_environment(scenario, pool, resolved.options.base_seed, &label)?;
        let samples = mean_trajectories(&mut env, resolved.options.record_stride);
        let path = out_dir.join(format!("means_{}.csv", scenario.name));
        write_file(&path, |w| write_mean_samples(w, &samples))?;

        if let Some(v) = report.violations.first() {
            failures.push(format!(
                "{}: t={} arm={} {} (expected {}, got {}; {} violations total)",
                scenario.name, v.t, v.arm, v.what, v.expected, v.actual,
                report.violations.len()
            ));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::invariant(format!("drift validation failed: {}", failures.join("; "))))
    }
}

/// Cluster MovieLens-style users, emitting the elbow table, the chosen-K
/// assignments, and the resulting arm metadata.
pub fn cmd_cluster(config: &Config, out_dir: &Path) -> Result<()> {
    let src = &config.sources.ml;
    if src.kind != "movielens" {
        return Err(Error::config(format!(
            "cluster needs sources.ml.kind = \"movielens\", got \"{}\"",
            src.kind
        )));
    }
    let (users, ratings) = read_movielens(src)?;
    let points = encode_users(&users);
    let cfg = KMeansConfig {
        max_iters: src.kmeans_max_iters,
        restarts: src.kmeans_restarts,
        seed: src.kmeans_seed,
    };

    ensure_dir(out_dir)?;
    write_provenance(config, out_dir)?;

    let curve = sse_curve(&points, src.elbow_min_k, src.elbow_max_k, &cfg)?;
    write_file(&out_dir.join("elbow.csv"), |w| {
        writeln!(w, "k,sse")?;
        for (k, sse) in &curve {
            writeln!(w, "{k},{sse}")?;
        }
        Ok(())
    })?;

    let model = kmeans(&points, src.clusters, &cfg)?;
    write_file(&out_dir.join("assignments.csv"), |w| {
        writeln!(w, "user_id,cluster")?;
        for (user, cluster) in users.iter().zip(&model.assignments) {
            writeln!(w, "{},{}", user.user_id, cluster)?;
        }
        Ok(())
    })?;

    let pools = driftlab_core::ingest::cluster_rating_pools(
        &users,
        &model.assignments,
        model.k,
        &ratings,
    )?;
    write_file(&out_dir.join("arms.csv"), |w| {
        writeln!(w, "arm_id,source,pool_size,pool_mean")?;
        for (i, pool) in pools.iter().enumerate() {
            writeln!(w, "{i},cluster-{i},{},{}", pool.len(), pool.mean())?;
        }
        Ok(())
    })?;
    Ok(())
}

fn curves_files(run_dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(run_dir).map_err(|e| io_at(run_dir, e))?;
    let mut found = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| io_at(run_dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_prefix("curves_").and_then(|n| n.strip_suffix(".csv")) {
            found.push((stem.to_string(), entry.path()));
        }
    }
    found.sort();
    if found.is_empty() {
        return Err(Error::config(format!(
            "no curves_<scenario>.csv files in {} (is this a run output directory?)",
            run_dir.display()
        )));
    }
    Ok(found)
}

/// Render a finished run directory: aligned text table from summary.csv plus
/// one plot-ready wide table per scenario.
pub fn cmd_report(run_dir: &Path) -> Result<()> {
    let summary_path = run_dir.join("summary.csv");
    let summary_text = fs::read(&summary_path).map_err(|e| io_at(&summary_path, e))?;
    let rows = read_summary(summary_text.as_slice())?;

    write_file(&run_dir.join("report.txt"), |w| write_report_text(w, &rows))?;

    for (scenario, path) in curves_files(run_dir)? {
        let text = fs::read(&path).map_err(|e| io_at(&path, e))?;
        let series = read_curves(text.as_slice())?;
        let plot_path = run_dir.join(format!("plot_{scenario}.csv"));
        write_file(&plot_path, |w| write_plot_table(w, &series))?;
    }
    Ok(())
}
