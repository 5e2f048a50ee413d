//! Deterministic CSV/text emission and re-parsing of experiment outputs. All
//! writers order rows by construction and contain no timestamps, so reruns
//! are byte-identical.

use super::episode::Trajectory;
use super::matrix::{Dynamics, MatrixResult, ScenarioResult, SeedRecord};
use crate::env::MeanSample;
use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

/// Display form of an aggregated cell.
pub fn format_cell(mean: f64, std: f64) -> String {
    format!("{mean:.2} ± {std:.2}")
}

/// Aggregated regret curves of one scenario:
/// `scenario,policy,t,mean_cum_regret,std_cum_regret`.
pub fn write_curves<W: Write>(w: &mut W, scenario: &ScenarioResult) -> Result<()> {
    writeln!(w, "scenario,policy,t,mean_cum_regret,std_cum_regret")?;
    for p in &scenario.policies {
        for i in 0..p.summary.ts.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                scenario.config.name, p.policy_id, p.summary.ts[i], p.summary.mean[i],
                p.summary.std[i]
            )?;
        }
    }
    Ok(())
}

/// One policy's aggregated curve, as read back from a curves file.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSeries {
    pub policy_id: String,
    pub ts: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Read back a curves file, preserving the policy order of the file.
pub fn read_curves<R: BufRead>(r: R) -> Result<Vec<CurveSeries>> {
    let mut out: Vec<CurveSeries> = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != "scenario,policy,t,mean_cum_regret,std_cum_regret" {
                return Err(Error::parse(format!("unexpected curves header: {line}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::parse(format!("curves line {}: {line}", i + 1)));
        }
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(format!("bad number '{s}' on curves line {}", i + 1)))
        };
        let t: u64 = f[2]
            .parse()
            .map_err(|_| Error::parse(format!("bad step '{}' on curves line {}", f[2], i + 1)))?;
        if out.last().map(|s| s.policy_id.as_str()) != Some(f[1]) {
            if out.iter().any(|s| s.policy_id == f[1]) {
                return Err(Error::parse(format!(
                    "curves rows for policy '{}' are not contiguous",
                    f[1]
                )));
            }
            out.push(CurveSeries {
                policy_id: f[1].to_string(),
                ts: Vec::new(),
                mean: Vec::new(),
                std: Vec::new(),
            });
        }
        let e = out.last_mut().expect("pushed above");
        e.ts.push(t);
        e.mean.push(parse_f(f[3])?);
        e.std.push(parse_f(f[4])?);
    }
    Ok(out)
}

/// The in-memory counterpart of [`read_curves`] for a finished scenario.
pub fn scenario_series(scenario: &ScenarioResult) -> Vec<CurveSeries> {
    scenario
        .policies
        .iter()
        .map(|p| CurveSeries {
            policy_id: p.policy_id.clone(),
            ts: p.summary.ts.clone(),
            mean: p.summary.mean.clone(),
            std: p.summary.std.clone(),
        })
        .collect()
}

const SUMMARY_HEADER: &str = "dataset,policy,stationary,stationary_mean,stationary_std,\
abrupt,abrupt_mean,abrupt_std,gradual,gradual_mean,gradual_std";

/// Final-regret table: one row per (dataset, policy), one display cell plus
/// machine mean/std columns per dynamics. Missing dynamics stay empty.
pub fn write_summary<W: Write>(w: &mut W, matrix: &MatrixResult) -> Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    let mut datasets: Vec<&str> = Vec::new();
    for s in &matrix.scenarios {
        if !datasets.contains(&s.config.dataset.as_str()) {
            datasets.push(&s.config.dataset);
        }
    }
    let mut policies: Vec<&str> = Vec::new();
    for s in &matrix.scenarios {
        for p in &s.policies {
            if !policies.contains(&p.policy_id.as_str()) {
                policies.push(&p.policy_id);
            }
        }
    }
    for ds in &datasets {
        for pol in &policies {
            let mut cells = vec![String::new(); 9];
            for s in matrix.scenarios.iter().filter(|s| s.config.dataset == *ds) {
                let Some(p) = s.policies.iter().find(|p| p.policy_id == *pol) else {
                    continue;
                };
                let base = match s.config.dynamics {
                    Dynamics::Stationary => 0,
                    Dynamics::Abrupt => 3,
                    Dynamics::Gradual => 6,
                };
                cells[base] = format_cell(p.final_mean, p.final_std);
                cells[base + 1] = format!("{}", p.final_mean);
                cells[base + 2] = format!("{}", p.final_std);
            }
            writeln!(w, "{ds},{pol},{}", cells.join(","))?;
        }
    }
    Ok(())
}

/// One parsed summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub dataset: String,
    pub policy: String,
    /// (display, mean, std) per dynamics, when present.
    pub cells: BTreeMap<&'static str, (String, f64, f64)>,
}

pub fn read_summary<R: BufRead>(r: R) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line != SUMMARY_HEADER {
                return Err(Error::parse(format!("unexpected summary header: {line}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 11 {
            return Err(Error::parse(format!("summary line {}: {line}", i + 1)));
        }
        let mut cells = BTreeMap::new();
        for (name, base) in [("stationary", 2), ("abrupt", 5), ("gradual", 8)] {
            if f[base].is_empty() {
                continue;
            }
            let mean: f64 = f[base + 1]
                .parse()
                .map_err(|_| Error::parse(format!("bad mean on summary line {}", i + 1)))?;
            let std: f64 = f[base + 2]
                .parse()
                .map_err(|_| Error::parse(format!("bad std on summary line {}", i + 1)))?;
            cells.insert(name, (f[base].to_string(), mean, std));
        }
        rows.push(SummaryRow {
            dataset: f[0].to_string(),
            policy: f[1].to_string(),
            cells,
        });
    }
    Ok(rows)
}

/// Seed manifest: `scenario,policy,run,label,seed_fingerprint`.
pub fn write_seeds<W: Write>(w: &mut W, seeds: &[SeedRecord]) -> Result<()> {
    writeln!(w, "scenario,policy,run,label,seed_fingerprint")?;
    for s in seeds {
        writeln!(w, "{},{},{},{},{}", s.scenario, s.policy, s.run, s.label, s.fingerprint)?;
    }
    Ok(())
}

/// True-mean trajectory export: `t,arm_id,true_mean`.
pub fn write_mean_samples<W: Write>(w: &mut W, samples: &[MeanSample]) -> Result<()> {
    writeln!(w, "t,arm_id,true_mean")?;
    for s in samples {
        writeln!(w, "{},{},{}", s.t, s.arm, s.mean)?;
    }
    Ok(())
}

/// Full per-step record of one episode (requires `keep_steps`).
pub fn write_trajectory<W: Write>(w: &mut W, traj: &Trajectory) -> Result<()> {
    let Some(steps) = &traj.steps else {
        return Err(Error::invariant("trajectory was run without per-step records"));
    };
    writeln!(w, "t,arm,reward,oracle_mean,chosen_mean,step_regret,cum_regret")?;
    for s in steps {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.t, s.arm, s.reward, s.oracle_mean, s.chosen_mean, s.step_regret, s.cum_regret
        )?;
    }
    Ok(())
}

/// Wide per-scenario table for plotting: t plus mean/std columns per policy.
pub fn write_plot_table<W: Write>(w: &mut W, series: &[CurveSeries]) -> Result<()> {
    let Some(first) = series.first() else {
        return Err(Error::invariant("plot table needs at least one series"));
    };
    let mut header = String::from("t");
    for s in series {
        header.push_str(&format!(",{0}_mean,{0}_std", s.policy_id));
    }
    writeln!(w, "{header}")?;
    for s in series {
        if s.ts != first.ts {
            return Err(Error::invariant("policies recorded on different grids"));
        }
    }
    for i in 0..first.ts.len() {
        let mut row = format!("{}", first.ts[i]);
        for s in series {
            row.push_str(&format!(",{},{}", s.mean[i], s.std[i]));
        }
        writeln!(w, "{row}")?;
    }
    Ok(())
}

/// Human-readable final table, one block per dataset.
pub fn write_report_text<W: Write>(w: &mut W, rows: &[SummaryRow]) -> Result<()> {
    writeln!(w, "Final cumulative regret (mean ± std across runs)")?;
    let mut datasets: Vec<&str> = Vec::new();
    for r in rows {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    for ds in datasets {
        writeln!(w)?;
        writeln!(w, "dataset: {ds}")?;
        writeln!(
            w,
            "{:<14} {:>20} {:>20} {:>20}",
            "policy", "stationary", "abrupt", "gradual"
        )?;
        for r in rows.iter().filter(|r| r.dataset == ds) {
            let cell = |d: &str| {
                r.cells
                    .get(d)
                    .map(|(disp, _, _)| disp.clone())
                    .unwrap_or_else(|| "-".into())
            };
            writeln!(
                w,
                "{:<14} {:>20} {:>20} {:>20}",
                r.policy,
                cell("stationary"),
                cell("abrupt"),
                cell("gradual")
            )?;
        }
    }
    Ok(())
}
