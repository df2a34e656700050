//! Coordinate frames, viewport state and the pan/zoom math shared by every
//! navigation technique.
//!
//! Both frames are centered with x to the right and y up. Screen coordinates
//! are meters on the physical display, map coordinates are meters on the
//! virtual map. A viewport is a center point on the map plus a scale in
//! screen meters per map meter; scale 1 is the 1:1 view.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! point_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
        pub struct $name {
            pub x: f64,
            pub y: f64,
        }

        impl $name {
            pub const ORIGIN: Self = Self { x: 0.0, y: 0.0 };

            pub const fn new(x: f64, y: f64) -> Self {
                Self { x, y }
            }

            pub fn length(self) -> f64 {
                self.x.hypot(self.y)
            }

            pub fn distance(self, other: Self) -> f64 {
                (self - other).length()
            }

            pub fn midpoint(self, other: Self) -> Self {
                Self::new((self.x + other.x) * 0.5, (self.y + other.y) * 0.5)
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                Self::new(self.x + rhs.x, self.y + rhs.y)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                Self::new(self.x - rhs.x, self.y - rhs.y)
            }
        }

        impl Mul<f64> for $name {
            type Output = Self;
            fn mul(self, rhs: f64) -> Self {
                Self::new(self.x * rhs, self.y * rhs)
            }
        }

        impl Div<f64> for $name {
            type Output = Self;
            fn div(self, rhs: f64) -> Self {
                Self::new(self.x / rhs, self.y / rhs)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                Self::new(-self.x, -self.y)
            }
        }
    };
}

point_type!(
    /// A point on the physical display, meters from the display center.
    ScreenPoint
);
point_type!(
    /// A point on the virtual map, meters from the map center.
    MapPoint
);

/// Virtual map extent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    pub name: String,
    pub width: f64,
    pub height: f64,
}

impl MapConfig {
    pub const SMALL_NAME: &'static str = "small";
    pub const LARGE_NAME: &'static str = "large";

    pub fn new(name: impl Into<String>, width: f64, height: f64) -> Result<Self> {
        let map = Self {
            name: name.into(),
            width,
            height,
        };
        map.validate()?;
        Ok(map)
    }

    /// 1.45 m x 0.69 m.
    pub fn small() -> Self {
        Self {
            name: Self::SMALL_NAME.to_owned(),
            width: 1.45,
            height: 0.69,
        }
    }

    /// 144.71 m x 69.11 m.
    pub fn large() -> Self {
        Self {
            name: Self::LARGE_NAME.to_owned(),
            width: 144.71,
            height: 69.11,
        }
    }

    /// Looks up one of the two study maps by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            Self::SMALL_NAME => Ok(Self::small()),
            Self::LARGE_NAME => Ok(Self::large()),
            other => Err(Error::Config(format!("unknown map `{other}`"))),
        }
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0 && self.height.is_finite() && self.height > 0.0) {
            return Err(Error::Config(format!(
                "map `{}` must have positive finite extents, got {} x {}",
                self.name, self.width, self.height
            )));
        }
        Ok(())
    }
}

/// Physical touch display extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DisplayConfig {
    pub width: f64,
    pub height: f64,
}

impl Default for DisplayConfig {
    /// 105 mm x 60 mm.
    fn default() -> Self {
        Self {
            width: 0.105,
            height: 0.060,
        }
    }
}

impl DisplayConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0 && self.height.is_finite() && self.height > 0.0) {
            return Err(Error::Config(format!(
                "display must have positive finite extents, got {} x {}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn half_extent(&self) -> ScreenPoint {
        ScreenPoint::new(self.width * 0.5, self.height * 0.5)
    }

    /// True when `p` lies inside the display rectangle (edges included).
    pub fn contains(&self, p: ScreenPoint) -> bool {
        let half = self.half_extent();
        p.x.abs() <= half.x && p.y.abs() <= half.y
    }

    /// Nearest point of the display rectangle to `p`.
    pub fn project(&self, p: ScreenPoint) -> ScreenPoint {
        let half = self.half_extent();
        ScreenPoint::new(p.x.clamp(-half.x, half.x), p.y.clamp(-half.y, half.y))
    }
}

/// Camera over the map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViewportState {
    pub center: MapPoint,
    pub scale: f64,
}

impl ViewportState {
    pub const fn new(center: MapPoint, scale: f64) -> Self {
        Self { center, scale }
    }

    /// The 1:1 view over the map center, where every session starts.
    pub const fn initial() -> Self {
        Self::new(MapPoint::ORIGIN, 1.0)
    }

    /// Bitwise equality, used by replay verification.
    pub fn bits_eq(&self, other: &Self) -> bool {
        self.center.x.to_bits() == other.center.x.to_bits()
            && self.center.y.to_bits() == other.center.y.to_bits()
            && self.scale.to_bits() == other.scale.to_bits()
    }
}

pub fn screen_to_map(p: ScreenPoint, v: &ViewportState) -> MapPoint {
    MapPoint::new(v.center.x + p.x / v.scale, v.center.y + p.y / v.scale)
}

pub fn map_to_screen(m: MapPoint, v: &ViewportState) -> ScreenPoint {
    ScreenPoint::new((m.x - v.center.x) * v.scale, (m.y - v.center.y) * v.scale)
}

/// Rescales `v` to `new_scale` keeping the map point under `pivot` fixed.
/// No clamping of any kind is applied.
pub fn zoom_about_pivot_unclamped(v: &ViewportState, pivot: ScreenPoint, new_scale: f64) -> ViewportState {
    let anchor = screen_to_map(pivot, v);
    ViewportState::new(
        MapPoint::new(anchor.x - pivot.x / new_scale, anchor.y - pivot.y / new_scale),
        new_scale,
    )
}

/// Smallest scale at which the whole map fits the display on the limiting axis.
pub fn min_scale(map: &MapConfig, display: &DisplayConfig) -> f64 {
    (display.width / map.width).min(display.height / map.height)
}

/// A map shown on a display: owns the bounds every viewport is clamped to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub map: MapConfig,
    pub display: DisplayConfig,
}

impl Stage {
    pub fn new(map: MapConfig, display: DisplayConfig) -> Result<Self> {
        map.validate()?;
        display.validate()?;
        let stage = Self { map, display };
        let s_min = stage.min_scale();
        if !(s_min > 0.0 && s_min <= 1.0) {
            return Err(Error::Config(format!(
                "map `{}` is smaller than the display (minimum scale {s_min} > 1)",
                stage.map.name
            )));
        }
        Ok(stage)
    }

    pub fn min_scale(&self) -> f64 {
        min_scale(&self.map, &self.display)
    }

    pub fn clamp_scale(&self, scale: f64) -> f64 {
        scale.clamp(self.min_scale(), 1.0)
    }

    /// Clamps scale into `[s_min, 1]`, then the center so the visible
    /// rectangle stays inside the map. An axis with no slack is pinned to 0.
    pub fn clamp_viewport(&self, v: &ViewportState) -> ViewportState {
        let scale = self.clamp_scale(v.scale);
        let slack_x = slack(self.map.width, self.display.width / scale);
        let slack_y = slack(self.map.height, self.display.height / scale);
        ViewportState::new(
            MapPoint::new(clamp_axis(v.center.x, slack_x), clamp_axis(v.center.y, slack_y)),
            scale,
        )
    }

    /// Pivot-preserving zoom followed by [`Stage::clamp_viewport`].
    pub fn zoom_about_pivot(&self, v: &ViewportState, pivot: ScreenPoint, new_scale: f64) -> ViewportState {
        let zoomed = zoom_about_pivot_unclamped(v, pivot, self.clamp_scale(new_scale));
        self.clamp_viewport(&zoomed)
    }

    /// Normalized scale: 0 with the whole map visible, 1 at 1:1.
    pub fn normalized_scale(&self, scale: f64) -> f64 {
        let s_min = self.min_scale();
        if s_min >= 1.0 {
            return 1.0;
        }
        ((scale - s_min) / (1.0 - s_min)).clamp(0.0, 1.0)
    }

    /// True when a map point projects inside the display rectangle.
    pub fn on_screen(&self, m: MapPoint, v: &ViewportState) -> bool {
        self.display.contains(map_to_screen(m, v))
    }
}

/// Room the center has on one axis. Rounding noise at the minimum scale
/// (visible extent equal to the map extent) counts as no room.
fn slack(map_extent: f64, visible_extent: f64) -> f64 {
    let room = (map_extent - visible_extent) * 0.5;
    if room <= map_extent * 1e-12 {
        0.0
    } else {
        room
    }
}

fn clamp_axis(value: f64, slack: f64) -> f64 {
    if slack == 0.0 {
        0.0
    } else {
        value.clamp(-slack, slack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_stage() -> Stage {
        Stage::new(MapConfig::small(), DisplayConfig::default()).unwrap()
    }

    #[test]
    fn screen_to_map_examples() {
        let v = ViewportState::new(MapPoint::new(3.0, -2.0), 0.25);
        assert_eq!(screen_to_map(ScreenPoint::ORIGIN, &v), v.center);

        let unit = ViewportState::initial();
        assert_eq!(screen_to_map(ScreenPoint::new(0.0105, 0.0), &unit), MapPoint::new(0.0105, 0.0));

        let half = ViewportState::new(MapPoint::new(0.5, 0.1), 0.5);
        let m = screen_to_map(ScreenPoint::new(0.0105, 0.0), &half);
        assert!((m.x - 0.521).abs() < 1e-12);
        assert_eq!(m.y, 0.1);
    }

    #[test]
    fn map_to_screen_examples() {
        let v = ViewportState::new(MapPoint::new(0.5, 0.1), 0.5);
        assert_eq!(map_to_screen(v.center, &v), ScreenPoint::ORIGIN);
        let p = map_to_screen(MapPoint::new(0.521, 0.1), &v);
        assert!((p.x - 0.0105).abs() < 1e-12);
        assert_eq!(p.y, 0.0);
    }

    #[test]
    fn zoom_about_pivot_examples() {
        let v = ViewportState::initial();
        // center' = m_pivot - pivot / s' = (0.05, 0.02) - (0.1, 0.04)
        let z = zoom_about_pivot_unclamped(&v, ScreenPoint::new(0.05, 0.02), 0.5);
        assert!((z.center.x + 0.05).abs() < 1e-15);
        assert!((z.center.y + 0.02).abs() < 1e-15);
        assert_eq!(z.scale, 0.5);

        let v = ViewportState::new(MapPoint::new(0.1, 0.05), 0.5);
        let centered = zoom_about_pivot_unclamped(&v, ScreenPoint::ORIGIN, 0.8);
        assert_eq!(centered.center, v.center);
        assert_eq!(centered.scale, 0.8);

        let stage = small_stage();
        let same = stage.zoom_about_pivot(&v, ScreenPoint::new(0.01, 0.01), v.scale);
        assert!((same.center.x - v.center.x).abs() < 1e-15);
        assert!((same.center.y - v.center.y).abs() < 1e-15);
        assert_eq!(same.scale, v.scale);
    }

    #[test]
    fn zoom_clamps_scale_range() {
        let stage = small_stage();
        let v = ViewportState::initial();
        assert_eq!(stage.zoom_about_pivot(&v, ScreenPoint::ORIGIN, 4.0).scale, 1.0);
        let out = stage.zoom_about_pivot(&v, ScreenPoint::ORIGIN, 1e-9);
        assert_eq!(out.scale, stage.min_scale());
        assert_eq!(out.center, MapPoint::ORIGIN);
    }

    #[test]
    fn clamp_viewport_examples() {
        let stage = small_stage();
        let at_min = ViewportState::new(MapPoint::new(0.3, -0.2), stage.min_scale());
        let c = stage.clamp_viewport(&at_min);
        assert_eq!(c.center, MapPoint::ORIGIN);

        let inside = ViewportState::new(MapPoint::new(0.1, -0.05), 0.7);
        assert_eq!(stage.clamp_viewport(&inside), inside);

        let far = ViewportState::new(MapPoint::new(10.0, 0.0), 1.0);
        let c = stage.clamp_viewport(&far);
        assert!((c.center.x - 0.6725).abs() < 1e-12);
        assert_eq!(c.center.y, 0.0);
    }

    #[test]
    fn min_scale_matches_study_ratios() {
        let display = DisplayConfig::default();
        let small = 1.0 / min_scale(&MapConfig::small(), &display);
        let large = 1.0 / min_scale(&MapConfig::large(), &display);
        assert!((small / 13.8 - 1.0).abs() < 0.005, "{small}");
        assert!((large / 1380.0 - 1.0).abs() < 0.005, "{large}");
    }

    #[test]
    fn stage_rejects_bad_dimensions() {
        assert!(MapConfig::new("x", 0.0, 1.0).is_err());
        assert!(MapConfig::preset("medium").is_err());
        let tiny = MapConfig::new("tiny", 0.05, 0.03).unwrap();
        assert!(Stage::new(tiny, DisplayConfig::default()).is_err());
    }

    #[test]
    fn normalized_scale_bounds() {
        let stage = small_stage();
        assert_eq!(stage.normalized_scale(1.0), 1.0);
        assert_eq!(stage.normalized_scale(stage.min_scale()), 0.0);
    }
}
