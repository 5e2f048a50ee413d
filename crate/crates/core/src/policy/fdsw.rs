//! Dual-view UCB: a decayed view and a windowed view scored per arm, fused by
//! a fixed aggregation function.

use super::{argmax_lowest, ArmId, BanditPolicy, DiscountedState, WindowState};

/// How the two per-arm view scores are fused into one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Aggregation {
    /// Pessimistic: both views must rate the arm highly.
    Min,
    /// Balanced: arithmetic mean of the two views.
    Mean,
    /// Optimistic: either view can promote the arm.
    Max,
}

impl Aggregation {
    pub fn id(self) -> &'static str {
        match self {
            Aggregation::Min => "min",
            Aggregation::Mean => "mean",
            Aggregation::Max => "max",
        }
    }

    pub fn all() -> [Aggregation; 3] {
        [Aggregation::Min, Aggregation::Mean, Aggregation::Max]
    }
}

/// Fuse two view scores.
pub fn aggregate(f: Aggregation, x: f64, y: f64) -> f64 {
    match f {
        Aggregation::Min => x.min(y),
        Aggregation::Mean => (x + y) / 2.0,
        Aggregation::Max => x.max(y),
    }
}

/// UCB policy that maintains both decayed and windowed statistics and selects
/// on their aggregated scores. An arm is cold while either view lacks data.
pub struct DualViewUcbPolicy {
    aggregation: Aggregation,
    discounted: DiscountedState,
    windowed: WindowState,
    discounted_alpha: f64,
    windowed_alpha: f64,
}

impl DualViewUcbPolicy {
    pub fn new(
        num_arms: usize,
        aggregation: Aggregation,
        gamma: f64,
        tau: usize,
        discounted_alpha: f64,
        windowed_alpha: f64,
    ) -> Self {
        DualViewUcbPolicy {
            aggregation,
            discounted: DiscountedState::new(num_arms, gamma),
            windowed: WindowState::new(num_arms, tau),
            discounted_alpha,
            windowed_alpha,
        }
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    fn first_cold(&self) -> Option<ArmId> {
        (0..self.num_arms())
            .map(ArmId)
            .find(|&a| self.discounted.is_cold(a) || self.windowed.is_empty(a))
    }

    /// Per-arm (decayed, windowed) view scores, available once every arm is
    /// warm in both views. Used by instrumented checks.
    pub fn component_scores(&self) -> Option<Vec<(f64, f64)>> {
        if self.first_cold().is_some() {
            return None;
        }
        let total = self.discounted.total_count();
        Some(
            (0..self.num_arms())
                .map(|a| {
                    let arm = ArmId(a);
                    (
                        self.discounted.score(arm, total, self.discounted_alpha),
                        self.windowed.score(arm, self.windowed_alpha),
                    )
                })
                .collect(),
        )
    }
}

impl BanditPolicy for DualViewUcbPolicy {
    fn num_arms(&self) -> usize {
        self.discounted.num_arms()
    }

    fn select(&self) -> ArmId {
        if let Some(cold) = self.first_cold() {
            return cold;
        }
        let total = self.discounted.total_count();
        let scores = (0..self.num_arms()).map(|a| {
            let arm = ArmId(a);
            aggregate(
                self.aggregation,
                self.discounted.score(arm, total, self.discounted_alpha),
                self.windowed.score(arm, self.windowed_alpha),
            )
        });
        ArmId(argmax_lowest(scores).expect("at least one arm"))
    }

    fn update(&mut self, arm: ArmId, reward: f64) {
        self.discounted.update(arm, reward);
        self.windowed.push(arm, reward);
    }
}
