//! Shared helpers for the integration tests.
#![allow(dead_code)]

use hovernav::geometry::{MapConfig, ScreenPoint};
use hovernav::log::{LogHeader, TickRecord};
use hovernav::service::{EngineConfig, SessionDescriptor};
use hovernav::task::Session;
use hovernav::techniques::{InputSample, TechniqueKind, Touch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn header(technique: TechniqueKind, map: &str, seed: u64) -> LogHeader {
    SessionDescriptor::new(format!("{technique}-{map}-{seed}"), technique, map, seed)
        .resolve(&EngineConfig::default(), "test")
        .unwrap()
}

pub fn map(name: &str) -> MapConfig {
    MapConfig::preset(name).unwrap()
}

/// Adversarial input generator: random hovers, dives toward the active
/// target, touches on and off targets, and two-finger gestures, in segments
/// of random length.
pub struct Fuzzer {
    rng: ChaCha8Rng,
    left: u32,
    mode: u8,
    id: u32,
    hover: (f64, f64, f64),
    offset: ScreenPoint,
}

impl Fuzzer {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            left: 0,
            mode: 0,
            id: 0,
            hover: (0.0, 0.0, 0.025),
            offset: ScreenPoint::ORIGIN,
        }
    }

    fn display_point(&mut self, session: &Session) -> ScreenPoint {
        let half = session.stage().display.half_extent();
        ScreenPoint::new(self.rng.random_range(-half.x..=half.x), self.rng.random_range(-half.y..=half.y))
    }

    pub fn next(&mut self, session: &Session) -> InputSample {
        if self.left == 0 {
            self.left = self.rng.random_range(1..=100);
            self.mode = self.rng.random_range(0..7);
            self.id += 1;
            let p = self.display_point(session);
            self.hover = (p.x, p.y, self.rng.random_range(0.0..0.06));
            self.offset = ScreenPoint::new(self.rng.random_range(-0.008..0.008), self.rng.random_range(-0.008..0.008));
        }
        self.left -= 1;
        let display = session.stage().display;
        let active = session.active_index().map(|i| session.target_screen(i));
        let at_active = |offset: ScreenPoint| active.map(|p| display.project(p + offset)).unwrap_or_default();
        match self.mode {
            0 => InputSample::hover(self.hover.0, self.hover.1, self.hover.2),
            1 => {
                // dive: zoom in over the active target
                let p = at_active(ScreenPoint::ORIGIN) * 0.5;
                InputSample::hover(p.x, p.y, 0.0)
            }
            2 | 3 => {
                let p = at_active(if self.mode == 2 { ScreenPoint::ORIGIN } else { self.offset });
                InputSample {
                    touches: vec![Touch { id: self.id, x: p.x, y: p.y }],
                    ..InputSample::hover(p.x, p.y, 0.0)
                }
            }
            4 => {
                let p = self.display_point(session);
                InputSample {
                    touches: vec![Touch { id: self.id, x: p.x, y: p.y }],
                    ..InputSample::hover(p.x, p.y, 0.0)
                }
            }
            5 => {
                // dwell on whichever inactive target is visible
                let p = (0..session.plan().targets.len())
                    .filter(|&i| Some(i) != session.active_index())
                    .map(|i| session.target_screen(i))
                    .find(|p| display.contains(*p))
                    .unwrap_or_default();
                InputSample {
                    touches: vec![Touch { id: self.id, x: p.x, y: p.y }],
                    ..InputSample::hover(p.x, p.y, 0.0)
                }
            }
            _ => {
                let (a, b) = (self.display_point(session), self.display_point(session));
                InputSample {
                    touches: vec![Touch { id: self.id, x: a.x, y: a.y }, Touch { id: self.id + 10_000, x: b.x, y: b.y }],
                    ..InputSample::hover(a.x, a.y, 0.0)
                }
            }
        }
    }
}

/// Drives a fresh session for up to `ticks` ticks with the fuzzer.
pub fn fuzz_session(header: &LogHeader, seed: u64, ticks: usize) -> (Session, Vec<TickRecord>) {
    let mut session = header.build_session().unwrap();
    let mut fuzzer = Fuzzer::new(seed);
    let mut records = Vec::with_capacity(ticks);
    while records.len() < ticks && !session.is_finished() {
        let input = fuzzer.next(&session);
        records.push(session.advance(&input).unwrap());
    }
    (session, records)
}
