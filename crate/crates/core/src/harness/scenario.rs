use serde::{Deserialize, Serialize};

use crate::env::{EnvConfig, MvnoScenario};
use crate::error::{Error, Result};

/// A named set of MVNOs sharing one base station.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub mvnos: Vec<MvnoScenario>,
    /// Experiment seeds; results are averaged over these.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn default_seeds() -> Vec<u64> {
    (0..5).collect()
}

impl ScenarioSpec {
    pub fn validate(&self, env: &EnvConfig) -> Result<()> {
        if self.mvnos.is_empty() {
            return Err(Error::config("scenario.mvnos", "at least one MVNO required"));
        }
        for m in &self.mvnos {
            m.validate(env)?;
        }
        let mut ids: Vec<usize> = self.mvnos.iter().map(|m| m.mvno_id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.mvnos.len() {
            return Err(Error::config("scenario.mvnos", "mvno_id values must be unique"));
        }
        let leased: f64 = self.mvnos.iter().map(|m| m.leased_bandwidth).sum();
        // Leases are usually computed as fractions of B; allow for rounding.
        if leased > env.total_bandwidth * (1.0 + 1e-12) {
            return Err(Error::config(
                "scenario.mvnos",
                format!("leased bandwidth {leased} exceeds total {}", env.total_bandwidth),
            ));
        }
        Ok(())
    }

    pub fn user_counts(&self) -> Vec<(usize, usize)> {
        self.mvnos.iter().map(|m| (m.mvno_id, m.n_users)).collect()
    }

    pub fn max_users(&self) -> usize {
        self.mvnos.iter().map(|m| m.n_users).max().unwrap_or(0)
    }
}

fn build(name: &str, users: [usize; 3], probs: [f64; 3], total_bandwidth: f64) -> ScenarioSpec {
    let total_users: usize = users.iter().sum();
    let mvnos = (0..3)
        .map(|i| MvnoScenario {
            mvno_id: i + 1,
            n_users: users[i],
            urllc_prob: probs[i],
            // Leases are proportional to user counts (an equal split when counts match).
            leased_bandwidth: total_bandwidth * users[i] as f64 / total_users as f64,
        })
        .collect();
    ScenarioSpec {
        name: name.to_string(),
        mvnos,
        seeds: default_seeds(),
    }
}

/// Training scenarios and their test-time shifts.
///
/// | name | users | URLLC probability |
/// |---|---|---|
/// | `noniid-equal` | 5/5/5 | .25/.50/.75 |
/// | `noniid-unequal` | 5/4/3 | .25/.50/.75 |
/// | `shift-1` | 5/5/5 | .75/.25/.50 |
/// | `shift-2` | 5/5/5 | .50/.75/.25 |
/// | `shift-users-1` | 4/3/5 | .25/.50/.75 |
/// | `shift-users-2` | 3/5/4 | .25/.50/.75 |
pub fn scenario_catalog(env: &EnvConfig) -> Vec<ScenarioSpec> {
    let b = env.total_bandwidth;
    vec![
        build("noniid-equal", [5, 5, 5], [0.25, 0.50, 0.75], b),
        build("noniid-unequal", [5, 4, 3], [0.25, 0.50, 0.75], b),
        build("shift-1", [5, 5, 5], [0.75, 0.25, 0.50], b),
        build("shift-2", [5, 5, 5], [0.50, 0.75, 0.25], b),
        build("shift-users-1", [4, 3, 5], [0.25, 0.50, 0.75], b),
        build("shift-users-2", [3, 5, 4], [0.25, 0.50, 0.75], b),
    ]
}

pub fn scenario_by_name(name: &str, env: &EnvConfig) -> Result<ScenarioSpec> {
    scenario_catalog(env)
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))
}
