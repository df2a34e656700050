//! Multiscale viewport navigation engine.
//!
//! Three techniques (rate-controlled hover, position-controlled hover and a
//! pinch/drag baseline) step a pan/zoom viewport over a map one input sample
//! per tick. On top of them sit the target acquisition task, scripted agents
//! that complete it autonomously, and the session service that records,
//! replays and analyzes runs.

pub mod agents;
pub mod error;
pub mod geometry;
pub mod log;
pub mod service;
pub mod task;
pub mod techniques;

pub use error::{Error, Result};
