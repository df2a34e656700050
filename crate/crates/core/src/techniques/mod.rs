//! Navigation techniques: each maps one [`InputSample`] per tick to a new
//! viewport.
//!
//! * [`RateControlled`] - finger height above the display sets zoom *speed*,
//!   the lower half zooming in and the upper half zooming out.
//! * [`PositionControlled`] - finger height sets the zoom *level* directly.
//! * [`PinchDrag`] - the touch-only baseline: drag to pan, pinch to zoom,
//!   with fling inertia.
//!
//! The two hover techniques share the same planar control: finger offset from
//! the display center drives a pan velocity, and the point under the finger
//! is the zoom pivot.

mod absolute;
mod baseline;
mod rate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{MapPoint, ScreenPoint, Stage, ViewportState};

pub use absolute::{AbsoluteParams, HeightMapping, PositionControlled};
pub use baseline::{BaselineParams, PinchDrag};
pub use rate::{RateControlled, RateParams};

/// The rate at which per-tick constants are defined.
pub const REFERENCE_TICK_RATE: f64 = 60.0;

/// Only the first two touches of a sample are interpreted.
pub const MAX_TOUCHES: usize = 2;

/// Hovering fingertip; `h` is the height above the display plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Finger {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Finger {
    pub fn position(&self) -> ScreenPoint {
        ScreenPoint::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Touch {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

impl Touch {
    pub fn position(&self) -> ScreenPoint {
        ScreenPoint::new(self.x, self.y)
    }
}

/// One tick of user input.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InputSample {
    pub finger: Finger,
    #[serde(default)]
    pub touches: Vec<Touch>,
    /// Seconds since session start. The engine overwrites this with its own
    /// clock, so client-supplied values are advisory.
    #[serde(default)]
    pub t: f64,
}

impl InputSample {
    /// Finger hovering at `h` over the display center, nothing touching.
    pub fn hover(x: f64, y: f64, h: f64) -> Self {
        Self {
            finger: Finger { x, y, h },
            touches: Vec::new(),
            t: 0.0,
        }
    }

    /// The interpreted touches (at most two).
    pub fn active_touches(&self) -> &[Touch] {
        &self.touches[..self.touches.len().min(MAX_TOUCHES)]
    }

    pub fn is_touching(&self) -> bool {
        !self.touches.is_empty()
    }

    /// Checks the sample's structural invariants against the display.
    pub fn validate(&self, stage: &Stage) -> Result<()> {
        let finite = [self.finger.x, self.finger.y, self.finger.h]
            .into_iter()
            .chain(self.touches.iter().flat_map(|t| [t.x, t.y]))
            .all(f64::is_finite);
        if !finite {
            return Err(Error::Protocol("input contains non-finite coordinates".into()));
        }
        if self.finger.h < 0.0 {
            return Err(Error::Protocol(format!("finger height {} is negative", self.finger.h)));
        }
        if let Some(t) = self.touches.iter().find(|t| !stage.display.contains(t.position())) {
            return Err(Error::Protocol(format!("touch {} at ({}, {}) is off the display", t.id, t.x, t.y)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TechniqueKind {
    #[serde(rename = "rate3d")]
    Rate3d,
    #[serde(rename = "absolute3d")]
    Absolute3d,
    #[serde(rename = "baseline2d")]
    Baseline2d,
}

impl TechniqueKind {
    pub const ALL: [TechniqueKind; 3] = [Self::Rate3d, Self::Absolute3d, Self::Baseline2d];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Rate3d => "rate3d",
            Self::Absolute3d => "absolute3d",
            Self::Baseline2d => "baseline2d",
        }
    }
}

impl fmt::Display for TechniqueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TechniqueKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown technique `{s}`")))
    }
}

/// Parameter sets for all techniques; only the one matching the session's
/// technique is used.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TechniqueParams {
    pub rate3d: RateParams,
    pub absolute3d: AbsoluteParams,
    pub baseline2d: BaselineParams,
}

impl TechniqueParams {
    pub fn validate(&self) -> Result<()> {
        self.rate3d.validate()?;
        self.absolute3d.validate()?;
        self.baseline2d.validate()
    }
}

/// Touch positions and fling velocity carried between baseline ticks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GestureMemory {
    pub touches: Vec<Touch>,
    /// Screen meters per second.
    pub fling: ScreenPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechniqueState {
    pub viewport: ViewportState,
    /// Where the 5 mm pivot disc is drawn.
    pub cursor_disc: ScreenPoint,
    pub gesture: GestureMemory,
}

impl TechniqueState {
    pub fn new(viewport: ViewportState) -> Self {
        Self {
            viewport,
            cursor_disc: ScreenPoint::ORIGIN,
            gesture: GestureMemory::default(),
        }
    }

    /// Session start: 1:1 scale over the map center.
    pub fn initial(stage: &Stage) -> Self {
        Self::new(stage.clamp_viewport(&ViewportState::initial()))
    }
}

/// Uniform per-tick stepping interface shared by the harness, the agents and
/// the live service.
pub trait Stepper: Send + Sync {
    fn kind(&self) -> TechniqueKind;

    fn step(&self, stage: &Stage, state: &TechniqueState, input: &InputSample) -> TechniqueState;

    /// The input that leaves a resting viewport unchanged.
    fn neutral_input(&self) -> InputSample;
}

/// Builds the stepper for `kind`, running at `tick_rate` Hz.
pub fn make_technique(kind: TechniqueKind, params: &TechniqueParams, tick_rate: f64) -> Result<Box<dyn Stepper>> {
    if !(tick_rate.is_finite() && tick_rate > 0.0) {
        return Err(Error::Config(format!("tick rate must be positive, got {tick_rate}")));
    }
    Ok(match kind {
        TechniqueKind::Rate3d => Box::new(RateControlled::new(params.rate3d.clone(), tick_rate)?),
        TechniqueKind::Absolute3d => Box::new(PositionControlled::new(params.absolute3d.clone(), tick_rate)?),
        TechniqueKind::Baseline2d => Box::new(PinchDrag::new(params.baseline2d.clone(), tick_rate)?),
    })
}

/// Planar rate control shared by both hover techniques: the finger's offset
/// from the display center, in millimeters, times `plane_base_speed` gives
/// display widths per tick of screen-space motion. Map motion divides by
/// scale so the perceived speed does not depend on zoom.
pub(crate) fn hover_pan(stage: &Stage, v: &ViewportState, finger: ScreenPoint, plane_base_speed: f64, tick_factor: f64) -> ViewportState {
    let gain = plane_base_speed * tick_factor * stage.display.width * 1000.0;
    let screen_step = finger * gain;
    let moved = ViewportState::new(
        MapPoint::new(v.center.x + screen_step.x / v.scale, v.center.y + screen_step.y / v.scale),
        v.scale,
    );
    stage.clamp_viewport(&moved)
}
