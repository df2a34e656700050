use serde::{Deserialize, Serialize};

use super::{hover_pan, InputSample, Stepper, TechniqueKind, TechniqueState, REFERENCE_TICK_RATE};
use crate::error::{Error, Result};
use crate::geometry::Stage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RateParams {
    /// Largest per-tick relative scale change, reached at `h_max` / `h_min`.
    pub zoom_base_speed: f64,
    /// Display widths per tick per millimeter of finger offset.
    pub plane_base_speed: f64,
    pub h_max: f64,
    pub h_min: f64,
    /// Half width of the no-zoom band around the midpoint height.
    pub dead_zone_half_width: f64,
    /// Tick rate at which the two base speeds are defined; at other engine
    /// rates they scale linearly with the tick period.
    pub reference_tick_rate: f64,
}

impl Default for RateParams {
    fn default() -> Self {
        Self {
            zoom_base_speed: 0.05,
            plane_base_speed: 0.001,
            h_max: 0.05,
            h_min: 0.0,
            dead_zone_half_width: 0.0,
            reference_tick_rate: REFERENCE_TICK_RATE,
        }
    }
}

impl RateParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.zoom_base_speed > 0.0 && self.zoom_base_speed < 1.0) {
            return Err(Error::Config(format!("zoom_base_speed must be in (0, 1), got {}", self.zoom_base_speed)));
        }
        if !(self.plane_base_speed >= 0.0 && self.plane_base_speed.is_finite()) {
            return Err(Error::Config(format!("plane_base_speed must be >= 0, got {}", self.plane_base_speed)));
        }
        if !(self.h_min >= 0.0 && self.h_min < self.h_max && self.h_max.is_finite()) {
            return Err(Error::Config(format!("need 0 <= h_min < h_max, got {} / {}", self.h_min, self.h_max)));
        }
        let half_span = (self.h_max - self.h_min) * 0.5;
        if !(self.dead_zone_half_width >= 0.0 && self.dead_zone_half_width < half_span) {
            return Err(Error::Config(format!(
                "dead_zone_half_width must be in [0, {half_span}), got {}",
                self.dead_zone_half_width
            )));
        }
        if !(self.reference_tick_rate > 0.0 && self.reference_tick_rate.is_finite()) {
            return Err(Error::Config(format!("reference_tick_rate must be positive, got {}", self.reference_tick_rate)));
        }
        Ok(())
    }

    pub fn h_mid(&self) -> f64 {
        (self.h_max + self.h_min) * 0.5
    }

    /// Per-tick scale multiplier at finger height `h`. Above the midpoint the
    /// map shrinks (zoom out), below it grows (zoom in); the normalized
    /// distance from the midpoint is saturated at 1.
    pub fn zoom_multiplier(&self, h: f64, tick_factor: f64) -> f64 {
        let h_mid = self.h_mid();
        let speed = self.zoom_base_speed * tick_factor;
        if h > h_mid + self.dead_zone_half_width {
            let u = ((h - h_mid) / (self.h_max - h_mid)).clamp(0.0, 1.0);
            1.0 - speed * u
        } else if h < h_mid - self.dead_zone_half_width {
            let u = ((h_mid - h) / (h_mid - self.h_min)).clamp(0.0, 1.0);
            1.0 + speed * u
        } else {
            1.0
        }
    }
}

/// Relative, rate-controlled hover navigation.
#[derive(Debug, Clone)]
pub struct RateControlled {
    params: RateParams,
    tick_factor: f64,
}

impl RateControlled {
    pub fn new(params: RateParams, tick_rate: f64) -> Result<Self> {
        params.validate()?;
        let tick_factor = params.reference_tick_rate / tick_rate;
        Ok(Self { params, tick_factor })
    }

    pub fn params(&self) -> &RateParams {
        &self.params
    }

    pub fn multiplier(&self, h: f64) -> f64 {
        self.params.zoom_multiplier(h, self.tick_factor)
    }
}

impl Stepper for RateControlled {
    fn kind(&self) -> TechniqueKind {
        TechniqueKind::Rate3d
    }

    fn step(&self, stage: &Stage, state: &TechniqueState, input: &InputSample) -> TechniqueState {
        let pivot = stage.display.project(input.finger.position());
        let mut next = state.clone();
        next.cursor_disc = pivot;
        if input.is_touching() {
            return next;
        }
        let v = &state.viewport;
        let zoomed = stage.zoom_about_pivot(v, pivot, v.scale * self.multiplier(input.finger.h));
        next.viewport = hover_pan(stage, &zoomed, pivot, self.params.plane_base_speed, self.tick_factor);
        next
    }

    fn neutral_input(&self) -> InputSample {
        InputSample::hover(0.0, 0.0, self.params.h_mid())
    }
}
