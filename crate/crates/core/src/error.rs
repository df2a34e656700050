use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("cannot place target {index} at {distance} m within map `{map}`")]
    Placement { index: usize, distance: f64, map: String },

    #[error("session already finished")]
    SessionFinished,

    #[error("log schema version {found} does not match supported version {expected}")]
    SchemaMismatch { found: u32, expected: u32 },

    #[error("malformed log at line {line}: {message}")]
    MalformedLog { line: usize, message: String },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("no input logs")]
    EmptyInput,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
