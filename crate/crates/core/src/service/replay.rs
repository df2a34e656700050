use std::path::Path;

use crate::error::Result;
use crate::log::{LogFooter, SessionLog, TickRecord};

/// First tick where the recomputed state differs from the recorded one.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub tick: u64,
    pub field: &'static str,
    pub recorded: String,
    pub recomputed: String,
}

#[derive(Debug, Clone)]
pub struct ReplayReport {
    /// Recomputed records up to (excluding) the first divergence.
    pub records: Vec<TickRecord>,
    pub verified_ticks: usize,
    pub divergence: Option<Divergence>,
    /// The source log was cut short; only its prefix was verified.
    pub truncated: bool,
}

impl ReplayReport {
    pub fn is_exact(&self) -> bool {
        self.divergence.is_none()
    }
}

/// Re-executes the recorded inputs through a fresh engine and checks every
/// recorded tick against the recomputed one, bit for bit.
pub fn replay(log: &SessionLog) -> Result<ReplayReport> {
    let mut session = log.header.build_session()?;
    let mut records = Vec::with_capacity(log.records.len());
    let mut divergence = None;

    for recorded in &log.records {
        let recomputed = match session.advance(&recorded.input) {
            Ok(r) => r,
            Err(_) => {
                divergence = Some(Divergence {
                    tick: recorded.tick,
                    field: "session",
                    recorded: "tick".into(),
                    recomputed: "session already finished".into(),
                });
                break;
            }
        };
        if let Some(d) = compare(recorded, &recomputed) {
            divergence = Some(d);
            break;
        }
        records.push(recomputed);
    }

    if divergence.is_none() {
        if let Some(footer) = &log.footer {
            let expected = LogFooter {
                ticks: session.ticks(),
                complete: session.is_finished(),
            };
            if *footer != expected {
                divergence = Some(Divergence {
                    tick: session.ticks(),
                    field: "end",
                    recorded: format!("{footer:?}"),
                    recomputed: format!("{expected:?}"),
                });
            }
        }
    }

    Ok(ReplayReport {
        verified_ticks: records.len(),
        records,
        divergence,
        truncated: log.truncated,
    })
}

pub fn replay_path(path: impl AsRef<Path>) -> Result<ReplayReport> {
    replay(&SessionLog::read_path(path)?)
}

fn compare(recorded: &TickRecord, recomputed: &TickRecord) -> Option<Divergence> {
    let diverge = |field: &'static str, a: String, b: String| {
        Some(Divergence {
            tick: recorded.tick,
            field,
            recorded: a,
            recomputed: b,
        })
    };
    if recorded.tick != recomputed.tick {
        return diverge("tick", recorded.tick.to_string(), recomputed.tick.to_string());
    }
    if recorded.t.to_bits() != recomputed.t.to_bits() {
        return diverge("t", recorded.t.to_string(), recomputed.t.to_string());
    }
    let (a, b) = (&recorded.viewport, &recomputed.viewport);
    let fields = [
        ("viewport.center.x", a.center.x, b.center.x),
        ("viewport.center.y", a.center.y, b.center.y),
        ("viewport.scale", a.scale, b.scale),
    ];
    for (field, x, y) in fields {
        if x.to_bits() != y.to_bits() {
            return diverge(field, format!("{x:?}"), format!("{y:?}"));
        }
    }
    if recorded.events != recomputed.events {
        return diverge("events", format!("{:?}", recorded.events), format!("{:?}", recomputed.events));
    }
    None
}
