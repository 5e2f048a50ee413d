//! Drift schedules: when and how arm/pool assignments change over a run.

use crate::error::Error;
use crate::Result;

/// Shape of one environmental change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    /// Instantaneous pool exchange at the start of the step.
    Abrupt,
    /// Linear interpolation toward the exchanged pools over a window, with
    /// the physical exchange applied at the window's end.
    Gradual,
}

/// One scheduled change. `duration` is zero for abrupt events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriftEvent {
    pub kind: DriftKind,
    pub start: u64,
    pub duration: u64,
}

impl DriftEvent {
    pub fn abrupt(start: u64) -> Self {
        DriftEvent { kind: DriftKind::Abrupt, start, duration: 0 }
    }

    pub fn gradual(start: u64, duration: u64) -> Self {
        DriftEvent { kind: DriftKind::Gradual, start, duration }
    }

    /// Step at which the change is fully in effect.
    pub fn end(&self) -> u64 {
        self.start + self.duration
    }
}

/// Validated, start-ordered list of non-overlapping drift events.
#[derive(Debug, Clone, Default)]
pub struct DriftSchedule {
    events: Vec<DriftEvent>,
}

impl DriftSchedule {
    pub fn stationary() -> Self {
        DriftSchedule { events: Vec::new() }
    }

    pub fn new(mut events: Vec<DriftEvent>, horizon: u64) -> Result<Self> {
        events.sort_by_key(|e| e.start);
        for e in &events {
            if e.start < 1 || e.start > horizon {
                return Err(Error::config(format!(
                    "drift event start {} outside horizon 1..={horizon}",
                    e.start
                )));
            }
            match e.kind {
                DriftKind::Abrupt => {
                    if e.duration != 0 {
                        return Err(Error::config("abrupt events must have zero duration"));
                    }
                }
                DriftKind::Gradual => {
                    if e.duration == 0 {
                        return Err(Error::config("gradual events need a positive duration"));
                    }
                    if e.end() > horizon {
                        return Err(Error::config(format!(
                            "gradual window {}..{} exceeds horizon {horizon}",
                            e.start,
                            e.end()
                        )));
                    }
                }
            }
        }
        for pair in events.windows(2) {
            if pair[1].start <= pair[0].end() {
                return Err(Error::config(format!(
                    "drift events overlap: one ends at {} and the next starts at {}",
                    pair[0].end(),
                    pair[1].start
                )));
            }
        }
        Ok(DriftSchedule { events })
    }

    pub fn events(&self) -> &[DriftEvent] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Changepoint count as used by the window-length heuristic: every event
    /// counts once, whatever its kind.
    pub fn num_changepoints(&self) -> u64 {
        self.events.len() as u64
    }
}

/// Interpolation weight inside a gradual window. Zero at the window start,
/// one at its end.
pub fn gradual_lambda(t: u64, start: u64, duration: u64) -> f64 {
    assert!(duration > 0, "gradual window needs a positive duration");
    assert!(
        t >= start && t <= start + duration,
        "lambda queried outside window: t={t}, window {start}..{}",
        start + duration
    );
    (t - start) as f64 / duration as f64
}

/// Pairs of arm indices to exchange: the two best-ranked arms against the two
/// worst-ranked (best with worst, second-best with second-worst). Ranking is
/// by current mean, descending, with ties broken toward the lower index.
pub fn swap_pairs(means: &[f64]) -> Result<Vec<(usize, usize)>> {
    if means.len() < 4 {
        return Err(Error::config(format!(
            "pool exchange needs at least 4 arms, got {}",
            means.len()
        )));
    }
    let mut order: Vec<usize> = (0..means.len()).collect();
    order.sort_by(|&a, &b| {
        means[b]
            .partial_cmp(&means[a])
            .expect("pool means are finite")
            .then(a.cmp(&b))
    });
    let n = order.len();
    Ok(vec![(order[0], order[n - 1]), (order[1], order[n - 2])])
}
