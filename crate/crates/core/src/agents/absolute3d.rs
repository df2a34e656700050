use super::{edge_toward, reacting, touchable, touching, Agent, AgentConfig, AgentKind, Dwell, Hand};
use crate::task::Session;
use crate::techniques::{AbsoluteParams, InputSample};

/// Drives the position-controlled hover technique. Height is the zoom level,
/// so the finger rises (at a bounded vertical speed) over the display edge
/// toward an off-screen target, then descends over the target until it
/// reaches the display and can touch.
pub struct Absolute3dAgent {
    config: AgentConfig,
    hand: Hand,
    h_max: f64,
    h: f64,
    dwell: Option<Dwell>,
}

impl Absolute3dAgent {
    pub fn new(config: AgentConfig) -> Self {
        Self::with_params(config, &AbsoluteParams::default())
    }

    pub fn with_params(config: AgentConfig, params: &AbsoluteParams) -> Self {
        Self {
            hand: Hand::new(&config),
            config,
            h_max: params.h_max,
            h: 0.0,
            dwell: None,
        }
    }
}

impl Agent for Absolute3dAgent {
    fn kind(&self) -> AgentKind {
        AgentKind::Absolute3d
    }

    fn act(&mut self, session: &Session) -> InputSample {
        if let Some(dwell) = self.dwell.as_mut() {
            match dwell.hold(session) {
                Some(touch) => return touching(touch, 0.0),
                None => self.dwell = None,
            }
        }
        let Some(active) = session.active_index() else {
            return InputSample::hover(0.0, 0.0, self.h);
        };
        if reacting(session, &self.config) {
            return InputSample::hover(0.0, 0.0, self.h);
        }

        let display = session.stage().display;
        let step = self.config.vertical_speed / session.tick_rate();
        let p = session.target_screen(active);

        if self.h == 0.0 && touchable(session, p) {
            let dwell = Dwell::start(&mut self.hand, active, p, &display);
            let touch = dwell.touch;
            self.dwell = Some(dwell);
            return touching(touch, 0.0);
        }
        if !display.contains(p) {
            self.h = (self.h + step).min(self.h_max);
            let edge = edge_toward(&display, p, 0.002);
            return InputSample::hover(edge.x, edge.y, self.h);
        }
        self.h = (self.h - step).max(0.0);
        InputSample::hover(p.x, p.y, self.h)
    }
}
