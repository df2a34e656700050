use serde::{Deserialize, Serialize};

use super::{InputSample, Stepper, TechniqueKind, TechniqueState, Touch};
use crate::error::{Error, Result};
use crate::geometry::{MapPoint, ScreenPoint, Stage, ViewportState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineParams {
    /// Screen displacement of content per unit of finger displacement.
    pub drag_gain: f64,
    /// Seconds for a fling velocity to halve.
    pub fling_friction_half_life: f64,
    /// Flings slower than this (screen m/s) stop.
    pub fling_min_speed: f64,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            drag_gain: 1.0,
            fling_friction_half_life: 0.3,
            fling_min_speed: 0.005,
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.drag_gain > 0.0 && self.drag_gain.is_finite()) {
            return Err(Error::Config(format!("drag_gain must be positive, got {}", self.drag_gain)));
        }
        if !(self.fling_friction_half_life > 0.0 && self.fling_friction_half_life.is_finite()) {
            return Err(Error::Config(format!(
                "fling_friction_half_life must be positive, got {}",
                self.fling_friction_half_life
            )));
        }
        if !(self.fling_min_speed >= 0.0 && self.fling_min_speed.is_finite()) {
            return Err(Error::Config(format!("fling_min_speed must be >= 0, got {}", self.fling_min_speed)));
        }
        Ok(())
    }
}

/// Pinch to zoom, drag to pan, with fling inertia. Finger height is never read.
#[derive(Debug, Clone)]
pub struct PinchDrag {
    params: BaselineParams,
    dt: f64,
    decay: f64,
}

impl PinchDrag {
    pub fn new(params: BaselineParams, tick_rate: f64) -> Result<Self> {
        params.validate()?;
        let dt = 1.0 / tick_rate;
        let decay = 0.5_f64.powf(dt / params.fling_friction_half_life);
        Ok(Self { params, dt, decay })
    }

    pub fn params(&self) -> &BaselineParams {
        &self.params
    }
}

fn previous(prev: &[Touch], id: u32) -> Option<ScreenPoint> {
    prev.iter().find(|t| t.id == id).map(Touch::position)
}

/// Content follows the finger: a screen displacement moves the center the
/// opposite way in map space.
fn drag(v: &ViewportState, screen_delta: ScreenPoint) -> ViewportState {
    ViewportState::new(
        MapPoint::new(v.center.x - screen_delta.x / v.scale, v.center.y - screen_delta.y / v.scale),
        v.scale,
    )
}

impl Stepper for PinchDrag {
    fn kind(&self) -> TechniqueKind {
        TechniqueKind::Baseline2d
    }

    fn step(&self, stage: &Stage, state: &TechniqueState, input: &InputSample) -> TechniqueState {
        let touches = input.active_touches();
        let memory = &state.gesture;
        let mut next = state.clone();
        let mut v = state.viewport;

        match touches {
            [] => {
                let fling = memory.fling;
                if fling.length() > self.params.fling_min_speed {
                    v = drag(&v, fling * self.dt);
                    next.gesture.fling = fling * self.decay;
                } else {
                    next.gesture.fling = ScreenPoint::ORIGIN;
                }
            }
            [one] => {
                next.cursor_disc = one.position();
                next.gesture.fling = match previous(&memory.touches, one.id) {
                    Some(before) => {
                        let delta = (one.position() - before) * self.params.drag_gain;
                        v = drag(&v, delta);
                        delta / self.dt
                    }
                    None => ScreenPoint::ORIGIN,
                };
            }
            [a, b, ..] => {
                let mid = a.position().midpoint(b.position());
                next.cursor_disc = mid;
                next.gesture.fling = ScreenPoint::ORIGIN;
                if let (Some(pa), Some(pb)) = (previous(&memory.touches, a.id), previous(&memory.touches, b.id)) {
                    let prev_mid = pa.midpoint(pb);
                    v = drag(&v, (mid - prev_mid) * self.params.drag_gain);
                    let prev_span = pa.distance(pb);
                    let span = a.position().distance(b.position());
                    if prev_span > 0.0 && span > 0.0 {
                        v = stage.zoom_about_pivot(&v, mid, v.scale * (span / prev_span));
                    }
                }
            }
        }

        next.viewport = stage.clamp_viewport(&v);
        next.gesture.touches = touches.to_vec();
        next
    }

    fn neutral_input(&self) -> InputSample {
        InputSample::default()
    }
}
