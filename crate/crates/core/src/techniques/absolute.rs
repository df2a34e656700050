use serde::{Deserialize, Serialize};

use super::{hover_pan, InputSample, Stepper, TechniqueKind, TechniqueState, REFERENCE_TICK_RATE};
use crate::error::{Error, Result};
use crate::geometry::Stage;

/// How finger height is interpolated between scale 1 (on the display) and
/// the minimum scale (at `h_max`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeightMapping {
    #[default]
    LinearInScale,
    LinearInLogScale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbsoluteParams {
    pub h_max: f64,
    pub mapping: HeightMapping,
    /// Planar pan gain, shared with the rate-controlled technique.
    pub plane_base_speed: f64,
    pub reference_tick_rate: f64,
}

impl Default for AbsoluteParams {
    fn default() -> Self {
        Self {
            h_max: 0.05,
            mapping: HeightMapping::LinearInScale,
            plane_base_speed: 0.001,
            reference_tick_rate: REFERENCE_TICK_RATE,
        }
    }
}

impl AbsoluteParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.h_max > 0.0 && self.h_max.is_finite()) {
            return Err(Error::Config(format!("h_max must be positive, got {}", self.h_max)));
        }
        if !(self.plane_base_speed >= 0.0 && self.plane_base_speed.is_finite()) {
            return Err(Error::Config(format!("plane_base_speed must be >= 0, got {}", self.plane_base_speed)));
        }
        if !(self.reference_tick_rate > 0.0 && self.reference_tick_rate.is_finite()) {
            return Err(Error::Config(format!("reference_tick_rate must be positive, got {}", self.reference_tick_rate)));
        }
        Ok(())
    }

    /// Scale for finger height `h` given the stage's minimum scale.
    pub fn scale_for_height(&self, h: f64, s_min: f64) -> f64 {
        let t = (h / self.h_max).clamp(0.0, 1.0);
        match self.mapping {
            HeightMapping::LinearInScale => s_min * t + (1.0 - t),
            HeightMapping::LinearInLogScale => (s_min.ln() * t).exp(),
        }
    }
}

/// Absolute, position-controlled hover navigation.
#[derive(Debug, Clone)]
pub struct PositionControlled {
    params: AbsoluteParams,
    tick_factor: f64,
}

impl PositionControlled {
    pub fn new(params: AbsoluteParams, tick_rate: f64) -> Result<Self> {
        params.validate()?;
        let tick_factor = params.reference_tick_rate / tick_rate;
        Ok(Self { params, tick_factor })
    }

    pub fn params(&self) -> &AbsoluteParams {
        &self.params
    }
}

impl Stepper for PositionControlled {
    fn kind(&self) -> TechniqueKind {
        TechniqueKind::Absolute3d
    }

    fn step(&self, stage: &Stage, state: &TechniqueState, input: &InputSample) -> TechniqueState {
        let pivot = stage.display.project(input.finger.position());
        let mut next = state.clone();
        next.cursor_disc = pivot;
        if input.is_touching() {
            return next;
        }
        let target = self.params.scale_for_height(input.finger.h, stage.min_scale());
        let zoomed = stage.zoom_about_pivot(&state.viewport, pivot, target);
        next.viewport = hover_pan(stage, &zoomed, pivot, self.params.plane_base_speed, self.tick_factor);
        next
    }

    /// Finger resting on the display center without contact: scale 1, no pan.
    fn neutral_input(&self) -> InputSample {
        InputSample::hover(0.0, 0.0, 0.0)
    }
}
