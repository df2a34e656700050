//! Line-delimited JSON messages exchanged with live clients. One message per
//! line, discriminated by `type`. Field names are frozen in `docs/SCHEMA.md`.

use serde::{Deserialize, Serialize};

use super::SessionDescriptor;
use crate::error::{Error, Result};
use crate::geometry::{DisplayConfig, MapConfig, ScreenPoint, ViewportState};
use crate::task::{MetricsReport, SessionView, TrialEvent};
use crate::techniques::{InputSample, TechniqueKind};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Hello { schema_version: u32 },
    Start { descriptor: SessionDescriptor },
    /// `client_tick` must strictly increase within a session.
    Input { client_tick: u64, sample: InputSample },
    Pause,
    Resume,
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSnapshot {
    pub index: usize,
    pub screen: ScreenPoint,
    pub on_screen: bool,
    pub active: bool,
}

/// Authoritative state after one engine tick; clients render only this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub tick: u64,
    pub elapsed_s: f64,
    pub viewport: ViewportState,
    pub scale: f64,
    pub normalized_scale: f64,
    pub cursor_disc: ScreenPoint,
    pub targets: Vec<TargetSnapshot>,
    pub selectable: bool,
    pub dwell_progress: f64,
    pub trial_index: usize,
    pub target_elapsed_s: f64,
    pub first_miss: u32,
    pub wrong_target: u32,
    pub paused: bool,
}

impl Snapshot {
    pub fn from_view(view: &SessionView, paused: bool) -> Self {
        Self {
            tick: view.tick,
            elapsed_s: view.t,
            viewport: view.viewport,
            scale: view.viewport.scale,
            normalized_scale: view.normalized_scale,
            cursor_disc: view.cursor_disc,
            targets: view
                .targets
                .iter()
                .map(|t| TargetSnapshot {
                    index: t.index,
                    screen: t.screen,
                    on_screen: t.on_screen,
                    active: t.active,
                })
                .collect(),
            selectable: view.selectable,
            dwell_progress: view.dwell_progress,
            trial_index: view.trial_index,
            target_elapsed_s: view.target_elapsed_s,
            first_miss: view.first_miss,
            wrong_target: view.wrong_target,
            paused,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello {
        schema_version: u32,
    },
    Started {
        session_id: String,
        technique: TechniqueKind,
        map: MapConfig,
        display: DisplayConfig,
        min_scale: f64,
        tick_rate: f64,
    },
    State(Snapshot),
    Event {
        tick: u64,
        event: TrialEvent,
    },
    Error {
        message: String,
    },
    SessionComplete {
        session_id: String,
        metrics: MetricsReport,
    },
}

impl ClientMessage {
    pub fn parse(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Protocol(format!("malformed message: {e}")))
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("message serializes")
    }
}

impl ServerMessage {
    pub fn parse(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::Protocol(format!("malformed message: {e}")))
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("message serializes")
    }

    pub fn error(message: impl Into<String>) -> Self {
        Self::Error { message: message.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::techniques::Touch;

    #[test]
    fn wire_names() {
        let line = ClientMessage::Input {
            client_tick: 4,
            sample: InputSample {
                touches: vec![Touch { id: 1, x: 0.0, y: 0.01 }],
                ..InputSample::hover(0.01, 0.0, 0.02)
            },
        }
        .to_line();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["type"], "input");
        assert_eq!(v["client_tick"], 4);
        assert_eq!(v["sample"]["finger"]["h"], 0.02);

        assert_eq!(ClientMessage::parse(r#"{"type":"pause"}"#).unwrap(), ClientMessage::Pause);
        let hello = ClientMessage::parse(r#"{"type":"hello","schema_version":1}"#).unwrap();
        assert_eq!(hello, ClientMessage::Hello { schema_version: 1 });
        assert!(ClientMessage::parse(r#"{"type":"teleport"}"#).is_err());
    }

    #[test]
    fn start_accepts_named_map() {
        let msg = ClientMessage::parse(
            r#"{"type":"start","descriptor":{"id":"p1","technique":"rate3d","map":"large","seed":3}}"#,
        )
        .unwrap();
        let ClientMessage::Start { descriptor } = msg else {
            panic!("expected start");
        };
        assert_eq!(descriptor.technique, TechniqueKind::Rate3d);
        assert_eq!(descriptor.tick_rate, 60.0);
    }
}
