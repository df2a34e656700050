//! Session lifecycle: descriptors and config files, the zero-order-hold
//! runner, log replay and analysis, and the line-delimited socket protocol
//! for live clients.

mod analyze;
mod protocol;
mod replay;
mod runner;
mod server;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DisplayConfig, MapConfig, Stage};
use crate::log::{LogHeader, SCHEMA_VERSION};
use crate::task::{generate_trial_plan_with, TaskParams};
use crate::techniques::{AbsoluteParams, BaselineParams, RateParams, TechniqueKind, TechniqueParams, REFERENCE_TICK_RATE};

pub use analyze::{analyze, analyze_paths, write_csv, AnalysisRow};
pub use protocol::{ClientMessage, ServerMessage, Snapshot, PROTOCOL_VERSION};
pub use replay::{replay, replay_path, Divergence, ReplayReport};
pub use runner::{run_session, simulate, SessionRunner};
pub use server::{serve, Server, ServerConfig};

/// A map given by preset name or by explicit dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapChoice {
    Named(String),
    Custom(MapConfig),
}

impl MapChoice {
    /// Resolves against the presets and any custom maps from the config file.
    pub fn resolve(&self, custom: &[MapConfig]) -> Result<MapConfig> {
        match self {
            Self::Custom(map) => {
                map.validate()?;
                Ok(map.clone())
            }
            Self::Named(name) => match custom.iter().find(|m| &m.name == name) {
                Some(map) => Ok(map.clone()),
                None => MapConfig::preset(name),
            },
        }
    }
}

impl From<&str> for MapChoice {
    fn from(name: &str) -> Self {
        Self::Named(name.to_owned())
    }
}

/// Engine-wide settings loadable from a TOML file. Every default is the
/// study constant.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub display: DisplayConfig,
    pub rate3d: RateParams,
    pub absolute3d: AbsoluteParams,
    pub baseline2d: BaselineParams,
    pub task: TaskParams,
    /// Extra maps addressable by name.
    pub maps: Vec<MapConfig>,
}

impl EngineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.display.validate()?;
        self.technique_params().validate()?;
        self.task.validate()?;
        self.maps.iter().try_for_each(MapConfig::validate)
    }

    pub fn technique_params(&self) -> TechniqueParams {
        TechniqueParams {
            rate3d: self.rate3d.clone(),
            absolute3d: self.absolute3d.clone(),
            baseline2d: self.baseline2d.clone(),
        }
    }
}

fn default_tick_rate() -> f64 {
    REFERENCE_TICK_RATE
}

/// What a client asks for when starting a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionDescriptor {
    pub id: String,
    pub technique: TechniqueKind,
    pub map: MapChoice,
    pub seed: u64,
    #[serde(default = "default_tick_rate")]
    pub tick_rate: f64,
    /// Overrides; absent fields fall back to the service's config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<EngineConfig>,
}

impl SessionDescriptor {
    pub fn new(id: impl Into<String>, technique: TechniqueKind, map: impl Into<MapChoice>, seed: u64) -> Self {
        Self {
            id: id.into(),
            technique,
            map: map.into(),
            seed,
            tick_rate: REFERENCE_TICK_RATE,
            config: None,
        }
    }

    /// Validates the descriptor and produces the header of its log,
    /// including the generated trial plan.
    pub fn resolve(&self, defaults: &EngineConfig, source: &str) -> Result<LogHeader> {
        if self.id.is_empty() {
            return Err(Error::Config("session id must not be empty".into()));
        }
        if !(self.tick_rate.is_finite() && self.tick_rate > 0.0) {
            return Err(Error::Config(format!("tick rate must be positive, got {}", self.tick_rate)));
        }
        let config = self.config.as_ref().unwrap_or(defaults);
        config.validate()?;
        let mut maps = config.maps.clone();
        maps.extend(defaults.maps.iter().cloned());
        let map = self.map.resolve(&maps)?;
        Stage::new(map.clone(), config.display)?;
        let plan = generate_trial_plan_with(&map, self.seed, &config.task)?;
        Ok(LogHeader {
            schema_version: SCHEMA_VERSION,
            session_id: self.id.clone(),
            technique: self.technique,
            map,
            display: config.display,
            seed: self.seed,
            tick_rate: self.tick_rate,
            params: config.technique_params(),
            task: config.task.clone(),
            plan,
            source: source.to_owned(),
        })
    }
}
