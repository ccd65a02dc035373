use ndarray::Array2;

use super::scenario::ScenarioSpec;
use crate::ddpg::Policy;
use crate::env::{AllocationAction, EnvConfig, EnvState, UserType};
use crate::error::{Error, Result};
use crate::seed::{rng_for, Stream};

/// A policy under evaluation and the label it is reported with.
#[derive(Debug, Clone)]
pub struct NamedPolicy {
    pub id: String,
    pub policy: Policy,
}

/// SLA violations of one model on one MVNO for one user type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCell {
    pub model_id: String,
    pub mvno_id: usize,
    pub user_type: UserType,
    pub violations: usize,
    /// User-observations of this type (upper bound for `violations`).
    pub users_observed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub scenario: String,
    pub n_obs: usize,
    pub seed: u64,
    pub cells: Vec<EvalCell>,
}

impl EvalReport {
    pub fn model_total(&self, model_id: &str) -> usize {
        self.cells
            .iter()
            .filter(|c| c.model_id == model_id)
            .map(|c| c.violations)
            .sum()
    }

    pub fn model_total_by_type(&self, model_id: &str, kind: UserType) -> usize {
        self.cells
            .iter()
            .filter(|c| c.model_id == model_id && c.user_type == kind)
            .map(|c| c.violations)
            .sum()
    }
}

/// Draws `n_obs` i.i.d. states per MVNO (fresh users and gains each time).
pub fn evaluation_states(spec: &ScenarioSpec, env: &EnvConfig, n_obs: usize, seed: u64) -> Result<Vec<Vec<EnvState>>> {
    let mut rng = rng_for(seed, Stream::Eval);
    let mut out = vec![Vec::with_capacity(n_obs); spec.mvnos.len()];
    for _ in 0..n_obs {
        for (i, m) in spec.mvnos.iter().enumerate() {
            out[i].push(EnvState::sample(m, env, &mut rng)?);
        }
    }
    Ok(out)
}

/// Counts per-user SLA violations (eMBB rate, URLLC delay) of every model's
/// greedy action over the same `n_obs` states.
pub fn evaluate(
    models: &[NamedPolicy],
    spec: &ScenarioSpec,
    env: &EnvConfig,
    n_obs: usize,
    seed: u64,
) -> Result<EvalReport> {
    spec.validate(env)?;
    let width = 2 * env.c_max;
    for m in models {
        if m.policy.actor.input_dim() != Some(width) || m.policy.actor.output_dim() != Some(env.c_max) {
            return Err(Error::contract(format!(
                "model `{}` does not fit c_max = {}",
                m.id, env.c_max
            )));
        }
    }
    let states = evaluation_states(spec, env, n_obs, seed)?;
    let mut cells = Vec::new();
    for m in models {
        for (mvno, mvno_states) in spec.mvnos.iter().zip(&states) {
            let mut obs = Array2::zeros((mvno_states.len(), width));
            for (k, s) in mvno_states.iter().enumerate() {
                obs.row_mut(k)
                    .iter_mut()
                    .zip(s.observation(env).as_slice())
                    .for_each(|(d, &v)| *d = v);
            }
            let actions = m.policy.act_batch(obs.view())?;
            let (mut embb, mut urllc) = ((0, 0), (0, 0));
            for (k, s) in mvno_states.iter().enumerate() {
                let out = s.score(&AllocationAction::new(actions.row(k).to_vec()), env)?;
                embb.0 += out.violations.embb_rate;
                urllc.0 += out.violations.urllc_delay;
                for u in &s.users {
                    match u.kind {
                        UserType::Embb => embb.1 += 1,
                        UserType::Urllc => urllc.1 += 1,
                    }
                }
            }
            for (kind, (violations, users_observed)) in [(UserType::Embb, embb), (UserType::Urllc, urllc)] {
                cells.push(EvalCell {
                    model_id: m.id.clone(),
                    mvno_id: mvno.mvno_id,
                    user_type: kind,
                    violations,
                    users_observed,
                });
            }
        }
    }
    Ok(EvalReport {
        scenario: spec.name.clone(),
        n_obs,
        seed,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario_by_name;
    use crate::nn::{Activation, Dense, NetParams};
    use ndarray::{Array1, Array2};

    /// Actor whose sigmoid head saturates at `logit` regardless of input.
    fn constant_policy(logit: f64, env: &EnvConfig) -> Policy {
        let c = env.c_max;
        Policy {
            actor: NetParams {
                layers: vec![Dense {
                    weight: Array2::zeros((c, 2 * c)),
                    bias: Array1::from_elem(c, logit),
                    activation: Activation::Sigmoid,
                }],
            },
            f_max: env.f_max,
        }
    }

    #[test]
    fn zero_allocation_violates_every_user() {
        let env = EnvConfig::default();
        let spec = scenario_by_name("noniid-equal", &env).unwrap();
        let models = [NamedPolicy {
            id: "zero".into(),
            policy: constant_policy(-800.0, &env),
        }];
        let rep = evaluate(&models, &spec, &env, 50, 0).unwrap();
        assert_eq!(rep.cells.len(), 3 * 2);
        assert_eq!(rep.model_total("zero"), 50 * 15);
        for c in &rep.cells {
            assert_eq!(c.violations, c.users_observed);
        }
    }

    #[test]
    fn repeat_evaluations_agree_and_models_share_states() {
        let env = EnvConfig::default();
        let spec = scenario_by_name("shift-1", &env).unwrap();
        let models = [
            NamedPolicy {
                id: "a".into(),
                policy: constant_policy(0.0, &env),
            },
            NamedPolicy {
                id: "b".into(),
                policy: constant_policy(0.0, &env),
            },
        ];
        let r1 = evaluate(&models, &spec, &env, 200, 3).unwrap();
        let r2 = evaluate(&models, &spec, &env, 200, 3).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.model_total("a"), r1.model_total("b"));
        for c in &r1.cells {
            assert!(c.violations <= 200 * 5);
        }
    }

    #[test]
    fn architecture_mismatch_is_rejected() {
        let env = EnvConfig::default();
        let spec = scenario_by_name("noniid-equal", &env).unwrap();
        let small = EnvConfig { c_max: 4, ..EnvConfig::default() };
        let models = [NamedPolicy {
            id: "x".into(),
            policy: constant_policy(0.0, &small),
        }];
        assert!(evaluate(&models, &spec, &env, 5, 0).is_err());
    }
}
