//! The multiscale search-and-acquisition task: trial plans, the per-tick
//! selection rules, and the dependent measures computed from a session log.

mod metrics;
mod plan;
mod session;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use metrics::{compute_metrics, mean_sd, ClassSummary, MetricsReport, TargetMetrics};
pub use plan::{generate_trial_plan, generate_trial_plan_with, DistanceClass, TargetSpec, TrialPlan};
pub use session::{Session, SessionView, TargetView, TrialEvent};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskParams {
    pub targets_per_class: usize,
    /// Screen radius of a target (10 mm diameter).
    pub target_radius: f64,
    /// Continuous contact required to select.
    pub dwell_s: f64,
    /// Tolerance on "scale is 1".
    pub scale_tolerance: f64,
}

impl Default for TaskParams {
    fn default() -> Self {
        Self {
            targets_per_class: 5,
            target_radius: 0.005,
            dwell_s: 1.0,
            scale_tolerance: 1e-6,
        }
    }
}

impl TaskParams {
    pub fn validate(&self) -> Result<()> {
        if self.targets_per_class == 0 {
            return Err(Error::Config("targets_per_class must be at least 1".into()));
        }
        if !(self.target_radius > 0.0 && self.target_radius.is_finite()) {
            return Err(Error::Config(format!("target_radius must be positive, got {}", self.target_radius)));
        }
        if !(self.dwell_s > 0.0 && self.dwell_s.is_finite()) {
            return Err(Error::Config(format!("dwell_s must be positive, got {}", self.dwell_s)));
        }
        if !(self.scale_tolerance >= 0.0 && self.scale_tolerance < 1.0) {
            return Err(Error::Config(format!("scale_tolerance must be in [0, 1), got {}", self.scale_tolerance)));
        }
        Ok(())
    }

    pub fn at_full_scale(&self, scale: f64) -> bool {
        scale >= 1.0 - self.scale_tolerance
    }

    /// Number of whole ticks whose duration first reaches the dwell time.
    pub fn dwell_ticks(&self, tick_rate: f64) -> u32 {
        ((self.dwell_s * tick_rate - 1e-9).ceil() as u32).max(1)
    }
}
