use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value failed validation. `key` names the offending field.
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// A caller broke an operation's precondition (wrong vector length, stale cache, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("aggregation failed: {0}")]
    Aggregation(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("oracle search exceeded its budget of {budget} nodes; try a larger grid step")]
    OracleBudget { budget: u64 },

    #[error("checkpoint {path}: {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    /// Training aborted; carries where in the loop it happened.
    #[error("round {round}, mvno {mvno}, episode {episode}: {source}")]
    Training {
        round: usize,
        mvno: usize,
        episode: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error("config serialize error: {0}")]
    ConfigSerialize(#[from] toml::ser::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
