//! Regret-curve analysis: post-changepoint phase decomposition and the
//! staircase recovery check for windowed policies.

use crate::Result;
use crate::error::Error;

/// Half-open post-changepoint phases `[c_i, c_{i+1})`, the last one running
/// to `horizon + 1`.
pub fn phase_bounds(changepoints: &[u64], horizon: u64) -> Vec<(u64, u64)> {
    let mut phases = Vec::new();
    for (i, &c) in changepoints.iter().enumerate() {
        let end = changepoints.get(i + 1).copied().unwrap_or(horizon + 1);
        phases.push((c, end));
    }
    phases
}

/// Mean per-step regret over steps `from..to` (half-open), from a
/// full-resolution cumulative-regret series (`cum[t-1]` is regret through
/// step t).
pub fn mean_step_regret(cum: &[f64], from: u64, to: u64) -> f64 {
    assert!(from >= 1 && from < to && (to as usize) <= cum.len() + 1);
    let at = |t: u64| if t == 0 { 0.0 } else { cum[(t - 1) as usize] };
    (at(to - 1) - at(from - 1)) / (to - from) as f64
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseCheck {
    pub start: u64,
    pub end: u64,
    pub len: u64,
    /// Whether the phase is long enough (> 2 tau) to be judged.
    pub qualifying: bool,
    /// Mean step regret over the first 2 tau steps of the phase.
    pub early: f64,
    /// Mean step regret over the phase's last quarter.
    pub late: f64,
    /// late <= early / 2, for qualifying phases.
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct StaircaseReport {
    pub tau: u64,
    pub phases: Vec<PhaseCheck>,
    pub any_qualifying: bool,
    pub all_ok: bool,
}

/// Check the recovery staircase on a mean cumulative-regret curve: in every
/// post-changepoint phase longer than 2 tau, the mean per-step regret over
/// the last quarter of the phase must drop to at most half of the mean over
/// the first 2 tau steps.
pub fn staircase_check(
    mean_cum: &[f64],
    changepoints: &[u64],
    horizon: u64,
    tau: u64,
) -> Result<StaircaseReport> {
    if mean_cum.len() != horizon as usize {
        return Err(Error::config(format!(
            "staircase needs a full-resolution curve: {} points for horizon {horizon}",
            mean_cum.len()
        )));
    }
    if tau == 0 || changepoints.is_empty() {
        return Err(Error::config("staircase needs a positive tau and changepoints"));
    }
    let mut phases = Vec::new();
    for (start, end) in phase_bounds(changepoints, horizon) {
        let len = end - start;
        let qualifying = len > 2 * tau;
        let (early, late, ok) = if qualifying {
            let early = mean_step_regret(mean_cum, start, start + 2 * tau);
            let quarter = (len / 4).max(1);
            let late = mean_step_regret(mean_cum, end - quarter, end);
            (early, late, late <= early / 2.0)
        } else {
            (f64::NAN, f64::NAN, true)
        };
        phases.push(PhaseCheck { start, end, len, qualifying, early, late, ok });
    }
    let any_qualifying = phases.iter().any(|p| p.qualifying);
    let all_ok = phases.iter().all(|p| p.ok);
    Ok(StaircaseReport { tau, phases, any_qualifying, all_ok })
}
