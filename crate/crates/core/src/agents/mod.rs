//! Scripted policies that complete trial plans without a human.
//!
//! Agents know where the active target is, so their acquisition times measure
//! navigation mechanics only; visual search is not modeled. Each agent reads
//! the session after the previous tick and returns the next input sample.

mod absolute3d;
mod greedy2d;
mod greedy3d;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DisplayConfig, MapPoint, ScreenPoint, ViewportState};
use crate::log::TickRecord;
use crate::task::Session;
use crate::techniques::{InputSample, TechniqueKind, Touch};

pub use absolute3d::Absolute3dAgent;
pub use greedy2d::Greedy2dAgent;
pub use greedy3d::Greedy3dAgent;

/// Simulated-time limit for one session.
pub const WATCHDOG_S: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentKind {
    #[serde(rename = "greedy3d")]
    Greedy3d,
    #[serde(rename = "greedy2d")]
    Greedy2d,
    #[serde(rename = "absolute3d")]
    Absolute3d,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [Self::Greedy3d, Self::Greedy2d, Self::Absolute3d];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Greedy3d => "greedy3d",
            Self::Greedy2d => "greedy2d",
            Self::Absolute3d => "absolute3d",
        }
    }

    /// The technique this policy knows how to drive.
    pub fn technique(self) -> TechniqueKind {
        match self {
            Self::Greedy3d => TechniqueKind::Rate3d,
            Self::Greedy2d => TechniqueKind::Baseline2d,
            Self::Absolute3d => TechniqueKind::Absolute3d,
        }
    }

    pub fn for_technique(kind: TechniqueKind) -> Self {
        match kind {
            TechniqueKind::Rate3d => Self::Greedy3d,
            TechniqueKind::Baseline2d => Self::Greedy2d,
            TechniqueKind::Absolute3d => Self::Absolute3d,
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown agent `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub kind: AgentKind,
    /// Idle time after each target becomes active.
    pub reaction_delay: f64,
    /// Per-axis Gaussian sd of touch-down points, screen meters.
    pub pointing_jitter_sd: f64,
    pub seed: u64,
    /// Pinch/drag strokes per second (baseline agent).
    pub strokes_per_s: f64,
    /// Finger travel of one pinch stroke, meters of separation change.
    pub pinch_travel: f64,
    /// Finger separation at the narrow end of a pinch.
    pub pinch_min_separation: f64,
    /// Vertical finger speed limit for the position-controlled agent, m/s.
    pub vertical_speed: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            kind: AgentKind::Greedy3d,
            reaction_delay: 0.2,
            pointing_jitter_sd: 0.001,
            seed: 0,
            strokes_per_s: 3.0,
            pinch_travel: 0.04,
            pinch_min_separation: 0.02,
            vertical_speed: 0.1,
        }
    }
}

impl AgentConfig {
    pub fn new(kind: AgentKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            ..Self::default()
        }
    }

    /// No reaction delay and no pointing noise.
    pub fn ideal(kind: AgentKind) -> Self {
        Self {
            reaction_delay: 0.0,
            pointing_jitter_sd: 0.0,
            ..Self::new(kind, 0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.reaction_delay >= 0.0, "reaction_delay must be >= 0"),
            (self.pointing_jitter_sd >= 0.0, "pointing_jitter_sd must be >= 0"),
            (self.strokes_per_s > 0.0, "strokes_per_s must be positive"),
            (self.pinch_travel > 0.0, "pinch_travel must be positive"),
            (self.pinch_min_separation > 0.0, "pinch_min_separation must be positive"),
            (self.vertical_speed > 0.0, "vertical_speed must be positive"),
        ];
        match checks.into_iter().find(|(ok, _)| !ok) {
            Some((_, message)) => Err(Error::Config(message.into())),
            None => Ok(()),
        }
    }
}

pub trait Agent {
    fn kind(&self) -> AgentKind;

    /// Input for the next tick given the session after the previous one.
    fn act(&mut self, session: &Session) -> InputSample;
}

pub fn make_agent(config: &AgentConfig) -> Result<Box<dyn Agent>> {
    config.validate()?;
    Ok(match config.kind {
        AgentKind::Greedy3d => Box::new(Greedy3dAgent::new(config.clone())),
        AgentKind::Greedy2d => Box::new(Greedy2dAgent::new(config.clone())),
        AgentKind::Absolute3d => Box::new(Absolute3dAgent::new(config.clone())),
    })
}

/// Outcome of driving a session with an agent.
#[derive(Debug, Clone)]
pub struct AgentRun {
    pub records: Vec<TickRecord>,
    pub completed: bool,
}

/// Steps `session` with `agent` until every target is selected or
/// `limit_s` of engine time passes.
pub fn run_agent(session: &mut Session, agent: &mut dyn Agent, limit_s: f64) -> Result<AgentRun> {
    let limit_ticks = (limit_s * session.tick_rate()).ceil() as u64;
    let mut records = Vec::new();
    while !session.is_finished() && session.ticks() < limit_ticks {
        let input = agent.act(session);
        records.push(session.advance(&input)?);
    }
    Ok(AgentRun {
        completed: session.is_finished(),
        records,
    })
}

/// Seeded touch-down source shared by the policies.
#[derive(Debug, Clone)]
struct Hand {
    rng: ChaCha8Rng,
    jitter: Option<Normal<f64>>,
    next_id: u32,
}

impl Hand {
    fn new(config: &AgentConfig) -> Self {
        let jitter = (config.pointing_jitter_sd > 0.0).then(|| Normal::new(0.0, config.pointing_jitter_sd).expect("finite sd"));
        Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            jitter,
            next_id: 0,
        }
    }

    fn fresh_id(&mut self) -> u32 {
        self.next_id = self.next_id.wrapping_add(1);
        self.next_id
    }

    /// Intended touch point plus pointing noise, kept on the display.
    fn aim(&mut self, intended: ScreenPoint, display: &DisplayConfig) -> ScreenPoint {
        let noisy = match &self.jitter {
            Some(normal) => intended + ScreenPoint::new(normal.sample(&mut self.rng), normal.sample(&mut self.rng)),
            None => intended,
        };
        display.project(noisy)
    }
}

/// A touch-down being held on the active target.
#[derive(Debug, Clone)]
struct Dwell {
    target: usize,
    touch: Touch,
    ticks: u32,
}

impl Dwell {
    fn start(hand: &mut Hand, target: usize, intended: ScreenPoint, display: &DisplayConfig) -> Self {
        let p = hand.aim(intended, display);
        Self {
            target,
            touch: Touch { id: hand.fresh_id(), x: p.x, y: p.y },
            ticks: 0,
        }
    }

    /// Continues the dwell, or returns `None` when the target changed or the
    /// touch has clearly missed and should be lifted for another attempt.
    fn hold(&mut self, session: &Session) -> Option<Touch> {
        let give_up = session.task().dwell_ticks(session.tick_rate()) + (0.3 * session.tick_rate()) as u32;
        if session.active_index() != Some(self.target) || self.ticks >= give_up {
            return None;
        }
        self.ticks += 1;
        Some(self.touch)
    }
}

fn touching(touch: Touch, h: f64) -> InputSample {
    InputSample {
        touches: vec![touch],
        ..InputSample::hover(touch.x, touch.y, h)
    }
}

/// Still reacting to a newly activated target.
fn reacting(session: &Session, config: &AgentConfig) -> bool {
    session.view().target_elapsed_s < config.reaction_delay - 1e-9
}

/// Target can be touched: 1:1 scale and its center comfortably on the display.
fn touchable(session: &Session, p: ScreenPoint) -> bool {
    const MARGIN: f64 = 0.003;
    let half = session.stage().display.half_extent();
    session.task().at_full_scale(session.viewport().scale) && p.x.abs() <= half.x - MARGIN && p.y.abs() <= half.y - MARGIN
}

/// False when the map edge stops the view from moving toward `p`.
fn can_pan_toward(session: &Session, p: ScreenPoint) -> bool {
    let v = session.viewport();
    let nudged = ViewportState::new(v.center + MapPoint::new(p.x, p.y) * (0.01 / v.scale), v.scale);
    let clamped = session.stage().clamp_viewport(&nudged);
    clamped.center.distance(v.center) > 0.5 * nudged.center.distance(v.center)
}

/// Point where the ray from the display center toward `p` leaves the
/// display, pulled in by `inset`.
fn edge_toward(display: &DisplayConfig, p: ScreenPoint, inset: f64) -> ScreenPoint {
    let half = display.half_extent();
    let (hx, hy) = (half.x - inset, half.y - inset);
    let len = p.length();
    if len == 0.0 {
        return ScreenPoint::ORIGIN;
    }
    let dir = p / len;
    let tx = if dir.x == 0.0 { f64::INFINITY } else { hx / dir.x.abs() };
    let ty = if dir.y == 0.0 { f64::INFINITY } else { hy / dir.y.abs() };
    dir * tx.min(ty)
}
