//! User-count-weighted model aggregation and the round barrier around it.

use std::collections::HashSet;

use crate::ddpg::{Agent, FlatModel};
use crate::error::{Error, Result};

/// One MVNO's contribution to a round.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelUpdate {
    pub mvno_id: usize,
    /// Number of users the MVNO serves; its aggregation weight.
    pub user_count: usize,
    pub payload: FlatModel,
    pub round_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalModel {
    pub round_index: usize,
    pub payload: FlatModel,
    pub total_users: usize,
}

/// `sum_i (c_i / sum c) * theta_i` for a single parameter vector.
pub fn weighted_average(parts: &[(&[f64], usize)]) -> Result<Vec<f64>> {
    let len = parts
        .first()
        .ok_or_else(|| Error::Aggregation("nothing to average".into()))?
        .0
        .len();
    if parts.iter().any(|(theta, c)| theta.len() != len || *c == 0) {
        return Err(Error::Aggregation("vectors must share a length and carry positive weights".into()));
    }
    let total = parts.iter().map(|(_, c)| *c).sum::<usize>() as f64;
    let parts: Vec<(&[f64], f64)> = parts.iter().map(|&(t, c)| (t, c as f64)).collect();
    Ok(weighted_mean(&parts, total))
}

/// `sum_i (c_i / total) * theta_i`.
fn weighted_mean(parts: &[(&[f64], f64)], total: f64) -> Vec<f64> {
    let len = parts[0].0.len();
    let mut out = vec![0.0; len];
    for (theta, c) in parts {
        let w = c / total;
        for (o, &t) in out.iter_mut().zip(theta.iter()) {
            *o += w * t;
        }
    }
    out
}

/// `theta_G = (1 / sum C_i) * sum C_i theta_i`, independently for each of the
/// four networks.
pub fn aggregate(updates: &[ModelUpdate]) -> Result<GlobalModel> {
    let first = updates
        .first()
        .ok_or_else(|| Error::Aggregation("no updates to aggregate".into()))?;
    let mut seen = HashSet::new();
    for u in updates {
        if !seen.insert(u.mvno_id) {
            return Err(Error::Aggregation(format!("duplicate update from mvno {}", u.mvno_id)));
        }
        if u.user_count == 0 {
            return Err(Error::Aggregation(format!("mvno {} reports zero users", u.mvno_id)));
        }
        if u.round_index != first.round_index {
            return Err(Error::Aggregation(format!(
                "mvno {} sent round {} during round {}",
                u.mvno_id, u.round_index, first.round_index
            )));
        }
        if u.payload.lengths() != first.payload.lengths() {
            return Err(Error::Aggregation(format!(
                "mvno {} payload lengths {:?} != {:?}",
                u.mvno_id,
                u.payload.lengths(),
                first.payload.lengths()
            )));
        }
    }
    let total_users: usize = updates.iter().map(|u| u.user_count).sum();
    let total = total_users as f64;
    let merge = |pick: fn(&FlatModel) -> &[f64]| {
        let parts: Vec<(&[f64], f64)> = updates
            .iter()
            .map(|u| (pick(&u.payload), u.user_count as f64))
            .collect();
        weighted_mean(&parts, total)
    };
    Ok(GlobalModel {
        round_index: first.round_index,
        payload: FlatModel {
            actor: merge(|p| &p.actor),
            critic: merge(|p| &p.critic),
            actor_target: merge(|p| &p.actor_target),
            critic_target: merge(|p| &p.critic_target),
        },
        total_users,
    })
}

/// Installs the global networks into every agent. Checks every agent first so
/// a mismatch leaves all of them untouched.
pub fn broadcast(global: &GlobalModel, agents: &mut [Agent]) -> Result<()> {
    for (i, agent) in agents.iter().enumerate() {
        if agent.export_params().lengths() != global.payload.lengths() {
            return Err(Error::contract(format!(
                "agent {i} architecture does not match the global model"
            )));
        }
    }
    for agent in agents.iter_mut() {
        agent.import_params(&global.payload)?;
    }
    Ok(())
}

/// Synchronous round barrier: gathers every agent's update, aggregates,
/// broadcasts, and advances the round counter.
#[derive(Debug, Clone, Default)]
pub struct RoundCoordinator {
    round_index: usize,
}

impl RoundCoordinator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn round_index(&self) -> usize {
        self.round_index
    }

    /// `mvnos` pairs each agent with its `(mvno_id, user_count)`.
    pub fn complete_round(&mut self, agents: &mut [Agent], mvnos: &[(usize, usize)]) -> Result<GlobalModel> {
        if agents.len() != mvnos.len() {
            return Err(Error::contract("one (mvno_id, user_count) pair per agent required"));
        }
        let updates: Vec<ModelUpdate> = agents
            .iter()
            .zip(mvnos)
            .map(|(a, &(mvno_id, user_count))| ModelUpdate {
                mvno_id,
                user_count,
                payload: a.export_params(),
                round_index: self.round_index,
            })
            .collect();
        let global = aggregate(&updates)?;
        broadcast(&global, agents)?;
        self.round_index += 1;
        Ok(global)
    }
}
