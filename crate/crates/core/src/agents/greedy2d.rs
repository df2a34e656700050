use std::collections::VecDeque;

use super::{can_pan_toward, edge_toward, reacting, touchable, touching, Agent, AgentConfig, AgentKind, Dwell, Hand};
use crate::geometry::{DisplayConfig, ScreenPoint};
use crate::task::Session;
use crate::techniques::{InputSample, Touch};

/// Drives the pinch/drag baseline with discrete strokes at a fixed cadence.
///
/// Every stroke is one grip tick, a linear motion, one still tick (so no
/// fling is released) and a short lift. Decisions are made between strokes:
/// pinch in about the display edge toward a distant off-screen target, drag a
/// nearby target toward the center, pinch out about a centered target, and
/// finally touch and dwell at 1:1.
pub struct Greedy2dAgent {
    config: AgentConfig,
    hand: Hand,
    script: VecDeque<Vec<Touch>>,
    dwell: Option<Dwell>,
}

/// Clearance kept between synthetic fingers and the display border.
const EDGE_CLEARANCE: f64 = 0.002;
/// A target this close to the center is pinched about directly.
const CENTERED: ScreenPoint = ScreenPoint::new(0.012, 0.010);
/// An off-screen target within this many half-extents is dragged into view
/// rather than found by zooming out.
const NEAR: f64 = 3.0;

impl Greedy2dAgent {
    pub fn new(config: AgentConfig) -> Self {
        Self {
            hand: Hand::new(&config),
            config,
            script: VecDeque::new(),
            dwell: None,
        }
    }

    fn stroke_ticks(&self, tick_rate: f64) -> usize {
        ((tick_rate / self.config.strokes_per_s).round() as usize).max(4)
    }

    fn max_separation(&self) -> f64 {
        self.config.pinch_min_separation + self.config.pinch_travel
    }

    /// Closest point to `p` about which a horizontal pinch fits on the display.
    fn pinch_center(&self, display: &DisplayConfig, p: ScreenPoint) -> ScreenPoint {
        let half = display.half_extent();
        let max_x = (half.x - self.max_separation() * 0.5 - EDGE_CLEARANCE).max(0.0);
        let max_y = half.y - EDGE_CLEARANCE;
        ScreenPoint::new(p.x.clamp(-max_x, max_x), p.y.clamp(-max_y, max_y))
    }

    /// Grip, move through `frames`, hold still, lift.
    fn queue_stroke(&mut self, tick_rate: f64, frames: impl Fn(f64) -> Vec<Touch>) {
        let total = self.stroke_ticks(tick_rate);
        let moving = total - 4;
        self.script.push_back(frames(0.0));
        for k in 1..=moving {
            self.script.push_back(frames(k as f64 / moving as f64));
        }
        self.script.push_back(frames(1.0));
        for _ in 0..total - moving - 2 {
            self.script.push_back(Vec::new());
        }
    }

    fn queue_pinch(&mut self, tick_rate: f64, center: ScreenPoint, from: f64, to: f64) {
        let (a, b) = (self.hand.fresh_id(), self.hand.fresh_id());
        self.queue_stroke(tick_rate, |f| {
            let half = (from + (to - from) * f) * 0.5;
            vec![
                Touch { id: a, x: center.x - half, y: center.y },
                Touch { id: b, x: center.x + half, y: center.y },
            ]
        });
    }

    fn queue_drag(&mut self, tick_rate: f64, start: ScreenPoint, end: ScreenPoint) {
        let id = self.hand.fresh_id();
        self.queue_stroke(tick_rate, |f| {
            let p = start + (end - start) * f;
            vec![Touch { id, x: p.x, y: p.y }]
        });
    }

    /// Plans the next stroke for the active target at screen position `p`.
    fn plan_stroke(&mut self, session: &Session, p: ScreenPoint) {
        let display = session.stage().display;
        let tick_rate = session.tick_rate();
        let (narrow, wide) = (self.config.pinch_min_separation, self.max_separation());
        let at_full = session.task().at_full_scale(session.viewport().scale);

        let half = display.half_extent();
        let near = p.x.abs() <= NEAR * half.x && p.y.abs() <= NEAR * half.y;
        if !display.contains(p) && !(near && can_pan_toward(session, p)) {
            let c = self.pinch_center(&display, edge_toward(&display, p, 0.0));
            self.queue_pinch(tick_rate, c, wide, narrow);
            return;
        }
        let centered = p.x.abs() <= CENTERED.x && p.y.abs() <= CENTERED.y;
        if (centered || !can_pan_toward(session, p)) && !at_full {
            let c = self.pinch_center(&display, p);
            self.queue_pinch(tick_rate, c, narrow, wide);
            return;
        }
        // Drag the content by -p, split evenly around the display center.
        let reach_x = 2.0 * (half.x - EDGE_CLEARANCE);
        let reach_y = 2.0 * (half.y - EDGE_CLEARANCE);
        let delta = ScreenPoint::new((-p.x).clamp(-reach_x, reach_x), (-p.y).clamp(-reach_y, reach_y));
        self.queue_drag(tick_rate, -delta * 0.5, delta * 0.5);
    }
}

impl Agent for Greedy2dAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Greedy2d
    }

    fn act(&mut self, session: &Session) -> InputSample {
        if let Some(dwell) = self.dwell.as_mut() {
            match dwell.hold(session) {
                Some(touch) => return touching(touch, 0.0),
                None => self.dwell = None,
            }
        }
        if let Some(touches) = self.script.pop_front() {
            return InputSample {
                touches,
                ..InputSample::default()
            };
        }
        let Some(active) = session.active_index() else {
            return InputSample::default();
        };
        if reacting(session, &self.config) {
            return InputSample::default();
        }

        let p = session.target_screen(active);
        if touchable(session, p) {
            let dwell = Dwell::start(&mut self.hand, active, p, &session.stage().display);
            let touch = dwell.touch;
            self.dwell = Some(dwell);
            return touching(touch, 0.0);
        }
        self.plan_stroke(session, p);
        let touches = self.script.pop_front().unwrap_or_default();
        InputSample {
            touches,
            ..InputSample::default()
        }
    }
}
