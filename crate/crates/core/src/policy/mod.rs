//! UCB-family bandit policies. All four variants share the same selection
//! contract: forced round-robin over cold arms first, then argmax over
//! per-arm scores with ties broken toward the lowest index.

mod ducb;
mod fdsw;
mod swucb;
mod ucb1;

pub use ducb::{discounted_score, DiscountedState, DiscountedUcbPolicy};
pub use fdsw::{aggregate, Aggregation, DualViewUcbPolicy};
pub use swucb::{window_score, SlidingWindowUcbPolicy, WindowState};
pub use ucb1::{ucb1_score, Ucb1Policy};

use crate::error::Error;
use crate::Result;
use std::fmt;

/// Discounted pull counts at or below this threshold are treated as zero, so
/// heavily decayed arms re-enter the forced round-robin instead of producing
/// near-singular score divisions.
pub const EPS_COUNT: f64 = 1e-9;

/// Zero-based arm index, valid within one environment/policy pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArmId(pub usize);

impl ArmId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ArmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Natural log clamped at zero, so early rounds (and empty histories) yield a
/// zero exploration bonus instead of a negative or undefined one.
pub fn log_guard(x: f64) -> f64 {
    x.ln().max(0.0)
}

/// Index of the maximum score, ties broken toward the lowest index.
pub(crate) fn argmax_lowest(scores: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        let better = match best {
            None => true,
            Some((_, b)) => s > b,
        };
        if better {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Shared selection rule. If any arm is cold the lowest-index cold arm is
/// forced regardless of scores; otherwise the best-scoring arm wins with ties
/// broken toward the lowest index.
pub fn select_arm(scores: &[f64], cold_arms: &[ArmId]) -> Result<ArmId> {
    if let Some(arm) = cold_arms.iter().min() {
        if arm.index() >= scores.len() {
            return Err(Error::invariant(format!(
                "cold arm {} out of range for {} arms",
                arm,
                scores.len()
            )));
        }
        return Ok(*arm);
    }
    argmax_lowest(scores.iter().copied())
        .map(ArmId)
        .ok_or_else(|| Error::config("cannot select from zero arms"))
}

/// Sliding-window length rule: tau = round(c * horizon / num_changepoints),
/// clamped to at least one sample. Stationary settings (zero changepoints)
/// must pick a window explicitly.
pub fn heuristic_window(horizon: u64, num_changepoints: u64, c: f64) -> Result<u64> {
    if horizon == 0 {
        return Err(Error::config("window heuristic requires a positive horizon"));
    }
    if num_changepoints == 0 {
        return Err(Error::config(
            "window heuristic undefined without changepoints; set the window explicitly",
        ));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::config(format!("window scale c must be positive, got {c}")));
    }
    let tau = (c * horizon as f64 / num_changepoints as f64).round();
    Ok((tau as u64).max(1))
}

/// How a windowed policy obtains its window length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowChoice {
    /// Fixed window length in samples.
    Explicit(u64),
    /// Derived from the horizon and changepoint count via [`heuristic_window`].
    Heuristic { c: f64 },
}

impl WindowChoice {
    pub fn resolve(self, horizon: u64, num_changepoints: u64) -> Result<u64> {
        match self {
            WindowChoice::Explicit(tau) => {
                if tau == 0 {
                    Err(Error::config("window length must be at least 1"))
                } else {
                    Ok(tau)
                }
            }
            WindowChoice::Heuristic { c } => heuristic_window(horizon, num_changepoints, c),
        }
    }
}

/// Which policy to instantiate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    Ucb1,
    DiscountedUcb,
    SlidingWindowUcb,
    DualViewUcb(Aggregation),
}

impl PolicyKind {
    /// Inverse of [`PolicySpec::id`].
    pub fn from_id(id: &str) -> Result<PolicyKind> {
        match id {
            "ucb1" => Ok(PolicyKind::Ucb1),
            "ducb" => Ok(PolicyKind::DiscountedUcb),
            "swucb" => Ok(PolicyKind::SlidingWindowUcb),
            "fdsw-min" => Ok(PolicyKind::DualViewUcb(Aggregation::Min)),
            "fdsw-mean" => Ok(PolicyKind::DualViewUcb(Aggregation::Mean)),
            "fdsw-max" => Ok(PolicyKind::DualViewUcb(Aggregation::Max)),
            other => Err(Error::config(format!(
                "unknown policy '{other}' (expected ucb1, ducb, swucb, fdsw-min, fdsw-mean, \
                 or fdsw-max)"
            ))),
        }
    }
}

/// Complete, buildable description of one policy configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Exploration scale applied to the confidence bonus.
    pub alpha: f64,
    /// Discount factor for the decayed statistics (discounted and dual-view).
    pub gamma: f64,
    /// Window rule for the windowed statistics (sliding-window and dual-view).
    pub window: WindowChoice,
    /// Per-view overrides for the dual-view policy; `alpha` is used when unset.
    pub discounted_alpha: Option<f64>,
    pub windowed_alpha: Option<f64>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind) -> Self {
        PolicySpec {
            kind,
            alpha: 1.0,
            gamma: 0.999,
            window: WindowChoice::Heuristic { c: 1.0 },
            discounted_alpha: None,
            windowed_alpha: None,
        }
    }

    /// Stable machine identifier, used in file names and output rows.
    pub fn id(&self) -> String {
        match self.kind {
            PolicyKind::Ucb1 => "ucb1".into(),
            PolicyKind::DiscountedUcb => "ducb".into(),
            PolicyKind::SlidingWindowUcb => "swucb".into(),
            PolicyKind::DualViewUcb(agg) => format!("fdsw-{}", agg.id()),
        }
    }

    /// Human-facing name for reports.
    pub fn display_name(&self) -> String {
        match self.kind {
            PolicyKind::Ucb1 => "UCB1".into(),
            PolicyKind::DiscountedUcb => "D-UCB".into(),
            PolicyKind::SlidingWindowUcb => "SW-UCB".into(),
            PolicyKind::DualViewUcb(agg) => format!("FDSW-UCB ({})", agg.id()),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::config(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        for a in [self.discounted_alpha, self.windowed_alpha].into_iter().flatten() {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::config(format!("view alpha must be positive, got {a}")));
            }
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::config(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Window length this spec would use, if it uses one.
    pub fn resolved_window(&self, horizon: u64, num_changepoints: u64) -> Result<Option<u64>> {
        match self.kind {
            PolicyKind::Ucb1 | PolicyKind::DiscountedUcb => Ok(None),
            PolicyKind::SlidingWindowUcb | PolicyKind::DualViewUcb(_) => {
                Ok(Some(self.window.resolve(horizon, num_changepoints)?))
            }
        }
    }

    /// Instantiate the policy for a given number of arms.
    pub fn build(
        &self,
        num_arms: usize,
        horizon: u64,
        num_changepoints: u64,
    ) -> Result<Box<dyn BanditPolicy>> {
        self.validate()?;
        if num_arms == 0 {
            return Err(Error::config("policies require at least one arm"));
        }
        Ok(match self.kind {
            PolicyKind::Ucb1 => Box::new(Ucb1Policy::new(num_arms, self.alpha)),
            PolicyKind::DiscountedUcb => {
                Box::new(DiscountedUcbPolicy::new(num_arms, self.gamma, self.alpha))
            }
            PolicyKind::SlidingWindowUcb => {
                let tau = self.window.resolve(horizon, num_changepoints)?;
                Box::new(SlidingWindowUcbPolicy::new(num_arms, tau as usize, self.alpha))
            }
            PolicyKind::DualViewUcb(agg) => {
                let tau = self.window.resolve(horizon, num_changepoints)?;
                Box::new(DualViewUcbPolicy::new(
                    num_arms,
                    agg,
                    self.gamma,
                    tau as usize,
                    self.discounted_alpha.unwrap_or(self.alpha),
                    self.windowed_alpha.unwrap_or(self.alpha),
                ))
            }
        })
    }
}

/// Sequential decision interface shared by every policy.
pub trait BanditPolicy: Send {
    fn num_arms(&self) -> usize;

    /// Arm to pull this round.
    fn select(&self) -> ArmId;

    /// Record the observed reward for the pulled arm.
    fn update(&mut self, arm: ArmId, reward: f64);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_prefers_lowest_cold_arm() {
        let scores = [f64::NEG_INFINITY, f64::NEG_INFINITY, 9.0, f64::NEG_INFINITY];
        let cold = [ArmId(3), ArmId(1)];
        assert_eq!(select_arm(&scores, &cold).unwrap(), ArmId(1));
    }

    #[test]
    fn select_breaks_ties_toward_lowest_index() {
        assert_eq!(select_arm(&[1.0, 3.0, 3.0], &[]).unwrap(), ArmId(1));
        assert_eq!(select_arm(&[2.0, 2.0, 2.0], &[]).unwrap(), ArmId(0));
    }

    #[test]
    fn select_picks_argmax_when_warm() {
        assert_eq!(select_arm(&[0.1, 0.9, 0.5], &[]).unwrap(), ArmId(1));
    }

    #[test]
    fn select_rejects_zero_arms() {
        assert!(select_arm(&[], &[]).is_err());
    }

    #[test]
    fn log_guard_clamps_small_counts() {
        assert_eq!(log_guard(1.0), 0.0);
        assert_eq!(log_guard(0.5), 0.0);
        assert_eq!(log_guard(0.0), 0.0);
        assert!(log_guard(10.0) > 0.0);
    }

    #[test]
    fn heuristic_window_matches_reference_points() {
        assert_eq!(heuristic_window(100_000, 4, 1.0).unwrap(), 25_000);
        assert_eq!(heuristic_window(100_000, 2, 1.0).unwrap(), 50_000);
        assert_eq!(heuristic_window(10, 4, 0.01).unwrap(), 1);
        assert_eq!(heuristic_window(10_000, 4, 1.0).unwrap(), 2_500);
        assert_eq!(heuristic_window(10_000, 4, 0.25).unwrap(), 625);
    }

    #[test]
    fn heuristic_window_requires_changepoints() {
        assert!(heuristic_window(100, 0, 1.0).is_err());
    }

    #[test]
    fn window_choice_validates() {
        assert!(WindowChoice::Explicit(0).resolve(10, 1).is_err());
        assert_eq!(WindowChoice::Explicit(7).resolve(10, 0).unwrap(), 7);
        assert_eq!(
            WindowChoice::Heuristic { c: 1.0 }.resolve(10_000, 4).unwrap(),
            2_500
        );
    }

    #[test]
    fn spec_ids_are_stable() {
        assert_eq!(PolicySpec::new(PolicyKind::Ucb1).id(), "ucb1");
        let fdsw = PolicySpec::new(PolicyKind::DualViewUcb(Aggregation::Max));
        assert_eq!(fdsw.id(), "fdsw-max");
        assert_eq!(fdsw.display_name(), "FDSW-UCB (max)");
    }

    #[test]
    fn spec_rejects_bad_parameters() {
        let mut spec = PolicySpec::new(PolicyKind::DiscountedUcb);
        spec.gamma = 0.0;
        assert!(spec.build(3, 100, 0).is_err());
        let mut spec = PolicySpec::new(PolicyKind::Ucb1);
        spec.alpha = -1.0;
        assert!(spec.build(3, 100, 0).is_err());
        let spec = PolicySpec::new(PolicyKind::SlidingWindowUcb);
        assert!(spec.build(3, 100, 0).is_err());
        assert!(spec.build(3, 100, 4).is_ok());
    }
}
