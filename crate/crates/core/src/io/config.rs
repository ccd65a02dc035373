use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ddpg::AgentConfig;
use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::harness::{scenario_by_name, ScenarioSpec, TrainMode, TrainParams};

/// Round structure of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FederationConfig {
    pub rounds: usize,
    pub episodes_per_round: usize,
    pub steps_per_episode: usize,
    /// `false` runs the local-only baseline.
    pub aggregate: bool,
    pub noise_decay: f64,
    pub heldout_states: usize,
}

impl Default for FederationConfig {
    fn default() -> Self {
        let p = TrainParams::full();
        Self {
            rounds: p.rounds,
            episodes_per_round: p.episodes_per_round,
            steps_per_episode: p.steps_per_episode,
            aggregate: true,
            noise_decay: p.noise_decay,
            heldout_states: p.heldout_states,
        }
    }
}

/// A catalog name or a fully spelled-out scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Named(String),
    Inline(ScenarioSpec),
}

impl Default for ScenarioRef {
    fn default() -> Self {
        ScenarioRef::Named("noniid-equal".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub scenario: ScenarioRef,
    pub env: EnvConfig,
    pub ddpg: AgentConfig,
    pub federation: FederationConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seeds: vec![0],
            output_dir: PathBuf::from("runs"),
            scenario: ScenarioRef::default(),
            env: EnvConfig::default(),
            ddpg: AgentConfig::default(),
            federation: FederationConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses TOML text and validates it.
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        cfg.ddpg.f_max = cfg.env.f_max;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "at least one seed required"));
        }
        self.train_params().validate()?;
        self.scenario_spec()?;
        Ok(())
    }

    /// Resolves the scenario against the catalog and checks it fits the environment.
    pub fn scenario_spec(&self) -> Result<ScenarioSpec> {
        let spec = match &self.scenario {
            ScenarioRef::Named(name) => scenario_by_name(name, &self.env)?,
            ScenarioRef::Inline(spec) => spec.clone(),
        };
        spec.validate(&self.env)?;
        Ok(spec)
    }

    pub fn train_params(&self) -> TrainParams {
        let mut agent = self.ddpg.clone();
        agent.f_max = self.env.f_max;
        TrainParams {
            env: self.env.clone(),
            agent,
            rounds: self.federation.rounds,
            episodes_per_round: self.federation.episodes_per_round,
            steps_per_episode: self.federation.steps_per_episode,
            noise_decay: self.federation.noise_decay,
            heldout_states: self.federation.heldout_states,
        }
    }

    pub fn mode(&self) -> TrainMode {
        if self.federation.aggregate {
            TrainMode::Fdrl
        } else {
            TrainMode::Local
        }
    }

    /// SHA-256 over every field except `output_dir`, as hex.
    pub fn digest(&self) -> Result<String> {
        let mut value = serde_json::to_value(self)?;
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
        }
        let bytes = serde_json::to_vec(&value)?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }
}

/// Reads and validates a TOML run configuration.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    RunConfig::from_toml(&text)
}
