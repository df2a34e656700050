use super::{can_pan_toward, edge_toward, reacting, touchable, touching, Agent, AgentConfig, AgentKind, Dwell, Hand};
use crate::task::Session;
use crate::techniques::{InputSample, RateParams};

/// Drives the rate-controlled hover technique.
///
/// 1. Target off-screen: hover at `h_max` over the display edge toward it, so
///    the view zooms out about that point while panning toward the target.
/// 2. Target on-screen but near the display border: hover over it at the
///    midpoint height, panning it inward without zooming.
/// 3. Hover over it at `h_min`; it is the zoom pivot, so it stays under the
///    finger while the pan keeps drawing it to the center.
/// 4. At 1:1 with the target on-screen, touch it and dwell.
pub struct Greedy3dAgent {
    config: AgentConfig,
    hand: Hand,
    rate: RateParams,
    dwell: Option<Dwell>,
}

/// Fraction of the display half-extent beyond which phase 2 pans first.
const BORDER_BAND: f64 = 0.8;

impl Greedy3dAgent {
    pub fn new(config: AgentConfig) -> Self {
        Self::with_params(config, RateParams::default())
    }

    /// Uses the technique's actual height bands.
    pub fn with_params(config: AgentConfig, rate: RateParams) -> Self {
        Self {
            hand: Hand::new(&config),
            config,
            rate,
            dwell: None,
        }
    }
}

impl Agent for Greedy3dAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Greedy3d
    }

    fn act(&mut self, session: &Session) -> InputSample {
        if let Some(dwell) = self.dwell.as_mut() {
            match dwell.hold(session) {
                Some(touch) => return touching(touch, 0.0),
                None => self.dwell = None,
            }
        }
        let neutral = InputSample::hover(0.0, 0.0, self.rate.h_mid());
        let Some(active) = session.active_index() else {
            return neutral;
        };
        if reacting(session, &self.config) {
            return neutral;
        }

        let stage = session.stage();
        let display = &stage.display;
        let p = session.target_screen(active);

        if touchable(session, p) {
            let dwell = Dwell::start(&mut self.hand, active, p, display);
            let touch = dwell.touch;
            self.dwell = Some(dwell);
            return touching(touch, 0.0);
        }
        if !display.contains(p) {
            let edge = edge_toward(display, p, 0.002);
            return InputSample::hover(edge.x, edge.y, self.rate.h_max);
        }
        let half = display.half_extent();
        let near_border = p.x.abs() > half.x * BORDER_BAND || p.y.abs() > half.y * BORDER_BAND;
        let h = if near_border && can_pan_toward(session, p) {
            self.rate.h_mid()
        } else {
            self.rate.h_min
        };
        InputSample::hover(p.x, p.y, h)
    }
}
