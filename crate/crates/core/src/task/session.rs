use serde::{Deserialize, Serialize};

use super::{TaskParams, TrialPlan};
use crate::error::{Error, Result};
use crate::geometry::{map_to_screen, MapPoint, ScreenPoint, Stage, ViewportState};
use crate::log::TickRecord;
use crate::techniques::{InputSample, Stepper, TechniqueKind, TechniqueState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrialEvent {
    /// Active target dwelled on for the full dwell time.
    Selected { target: usize },
    /// A touch-down stayed outside the active target for the dwell time while
    /// the target was selectable.
    FirstMiss { target: usize },
    /// A dwell completed on an inactive target.
    WrongTarget { target: usize },
}

/// Dwell bookkeeping for the current touch-down.
#[derive(Debug, Clone)]
struct Contact {
    id: u32,
    inside_ticks: u32,
    outside_ticks: u32,
    wrong: Option<(usize, u32)>,
    miss_reported: bool,
    /// A selection or wrong-target already happened on this touch-down.
    spent: bool,
}

impl Contact {
    fn new(id: u32) -> Self {
        Self {
            id,
            inside_ticks: 0,
            outside_ticks: 0,
            wrong: None,
            miss_reported: false,
            spent: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetView {
    pub index: usize,
    pub position: MapPoint,
    pub screen: ScreenPoint,
    pub on_screen: bool,
    pub active: bool,
}

/// What a client or agent sees after a tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub tick: u64,
    pub t: f64,
    pub viewport: ViewportState,
    pub normalized_scale: f64,
    pub cursor_disc: ScreenPoint,
    pub active: Option<TargetView>,
    pub targets: Vec<TargetView>,
    pub selectable: bool,
    pub dwell_s: f64,
    pub dwell_progress: f64,
    pub trial_index: usize,
    pub target_elapsed_s: f64,
    pub first_miss: u32,
    pub wrong_target: u32,
    pub finished: bool,
}

/// One participant working through one trial plan with one technique.
pub struct Session {
    stage: Stage,
    stepper: Box<dyn Stepper>,
    plan: TrialPlan,
    task: TaskParams,
    tick_rate: f64,
    dwell_ticks: u32,
    tick: u64,
    state: TechniqueState,
    active: usize,
    target_ticks: u64,
    contact: Option<Contact>,
    first_miss: u32,
    wrong_target: u32,
}

impl Session {
    pub fn new(stage: Stage, stepper: Box<dyn Stepper>, plan: TrialPlan, task: TaskParams, tick_rate: f64) -> Result<Self> {
        task.validate()?;
        if plan.targets.is_empty() {
            return Err(Error::Config("trial plan has no targets".into()));
        }
        if !(tick_rate > 0.0 && tick_rate.is_finite()) {
            return Err(Error::Config(format!("tick rate must be positive, got {tick_rate}")));
        }
        let state = TechniqueState::initial(&stage);
        Ok(Self {
            dwell_ticks: task.dwell_ticks(tick_rate),
            stage,
            stepper,
            plan,
            task,
            tick_rate,
            tick: 0,
            state,
            active: 0,
            target_ticks: 0,
            contact: None,
            first_miss: 0,
            wrong_target: 0,
        })
    }

    pub fn stage(&self) -> &Stage {
        &self.stage
    }

    pub fn plan(&self) -> &TrialPlan {
        &self.plan
    }

    pub fn task(&self) -> &TaskParams {
        &self.task
    }

    pub fn technique(&self) -> TechniqueKind {
        self.stepper.kind()
    }

    pub fn stepper(&self) -> &dyn Stepper {
        self.stepper.as_ref()
    }

    pub fn state(&self) -> &TechniqueState {
        &self.state
    }

    pub fn viewport(&self) -> &ViewportState {
        &self.state.viewport
    }

    pub fn tick_rate(&self) -> f64 {
        self.tick_rate
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.tick_rate
    }

    pub fn ticks(&self) -> u64 {
        self.tick
    }

    /// Engine time after the last completed tick.
    pub fn elapsed(&self) -> f64 {
        self.tick as f64 / self.tick_rate
    }

    pub fn is_finished(&self) -> bool {
        self.active >= self.plan.targets.len()
    }

    pub fn active_index(&self) -> Option<usize> {
        (!self.is_finished()).then_some(self.active)
    }

    pub fn error_counts(&self) -> (u32, u32) {
        (self.first_miss, self.wrong_target)
    }

    /// Seconds of valid dwell accumulated on the active target.
    pub fn dwell_accumulated(&self) -> f64 {
        self.contact.as_ref().map_or(0.0, |c| c.inside_ticks as f64 / self.tick_rate)
    }

    /// Active target is selectable: viewport at 1:1 and target on-screen.
    pub fn is_selectable(&self) -> bool {
        self.active_index()
            .is_some_and(|i| self.target_selectable(i, &self.state.viewport))
    }

    fn target_selectable(&self, index: usize, v: &ViewportState) -> bool {
        self.task.at_full_scale(v.scale) && self.stage.on_screen(self.plan.targets[index].position, v)
    }

    pub fn target_screen(&self, index: usize) -> ScreenPoint {
        map_to_screen(self.plan.targets[index].position, &self.state.viewport)
    }

    /// Advances one tick. The sample's time is overwritten with engine time.
    pub fn advance(&mut self, input: &InputSample) -> Result<TickRecord> {
        if self.is_finished() {
            return Err(Error::SessionFinished);
        }
        let tick = self.tick;
        self.tick += 1;
        self.target_ticks += 1;
        let t = self.elapsed();
        let mut input = input.clone();
        input.t = t;

        self.state = self.stepper.step(&self.stage, &self.state, &input);
        let events = self.evaluate_selection(&input);

        Ok(TickRecord {
            tick,
            t,
            input,
            viewport: self.state.viewport,
            events,
        })
    }

    fn evaluate_selection(&mut self, input: &InputSample) -> Vec<TrialEvent> {
        let mut events = Vec::new();
        // Dwell needs exactly one contact; two or more are a gesture.
        let touch = match input.active_touches() {
            [one] => *one,
            _ => {
                self.contact = None;
                return events;
            }
        };
        let mut contact = match self.contact.take() {
            Some(c) if c.id == touch.id => c,
            _ => Contact::new(touch.id),
        };
        if contact.spent {
            self.contact = Some(contact);
            return events;
        }

        let v = self.state.viewport;
        let point = touch.position();
        let active = &self.plan.targets[self.active];
        let selectable = self.target_selectable(self.active, &v);
        let inside_active = point.distance(map_to_screen(active.position, &v)) <= active.screen_radius;

        if selectable && inside_active {
            contact.inside_ticks += 1;
            contact.outside_ticks = 0;
            contact.wrong = None;
            if contact.inside_ticks >= self.dwell_ticks {
                events.push(TrialEvent::Selected { target: self.active });
                contact.inside_ticks = 0;
                contact.spent = true;
                self.active += 1;
                self.target_ticks = 0;
            }
            self.contact = Some(contact);
            return events;
        }
        contact.inside_ticks = 0;

        let wrong = self.task.at_full_scale(v.scale).then(|| {
            self.plan.targets.iter().find(|t| {
                t.index != self.active && {
                    let screen = map_to_screen(t.position, &v);
                    self.stage.display.contains(screen) && point.distance(screen) <= t.screen_radius
                }
            })
        });
        if let Some(Some(red)) = wrong {
            let ticks = match contact.wrong {
                Some((index, n)) if index == red.index => n + 1,
                _ => 1,
            };
            contact.wrong = Some((red.index, ticks));
            contact.outside_ticks = 0;
            if ticks >= self.dwell_ticks {
                events.push(TrialEvent::WrongTarget { target: red.index });
                self.wrong_target += 1;
                contact.spent = true;
            }
            self.contact = Some(contact);
            return events;
        }
        contact.wrong = None;

        if selectable {
            contact.outside_ticks += 1;
            if contact.outside_ticks >= self.dwell_ticks && !contact.miss_reported {
                events.push(TrialEvent::FirstMiss { target: self.active });
                self.first_miss += 1;
                contact.miss_reported = true;
            }
        } else {
            contact.outside_ticks = 0;
        }
        self.contact = Some(contact);
        events
    }

    pub fn view(&self) -> SessionView {
        let v = self.state.viewport;
        let targets: Vec<TargetView> = self
            .plan
            .targets
            .iter()
            .map(|t| {
                let screen = map_to_screen(t.position, &v);
                TargetView {
                    index: t.index,
                    position: t.position,
                    screen,
                    on_screen: self.stage.display.contains(screen),
                    active: t.index == self.active,
                }
            })
            .collect();
        let dwell_s = self.dwell_accumulated();
        SessionView {
            tick: self.tick,
            t: self.elapsed(),
            viewport: v,
            normalized_scale: self.stage.normalized_scale(v.scale),
            cursor_disc: self.state.cursor_disc,
            active: targets.get(self.active).cloned(),
            targets,
            selectable: self.is_selectable(),
            dwell_s,
            dwell_progress: (dwell_s / self.task.dwell_s).clamp(0.0, 1.0),
            trial_index: self.active,
            target_elapsed_s: self.target_ticks as f64 / self.tick_rate,
            first_miss: self.first_miss,
            wrong_target: self.wrong_target,
            finished: self.is_finished(),
        }
    }
}
