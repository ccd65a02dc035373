use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::ScenarioSpec;
use crate::ddpg::{Agent, AgentConfig, AgentParams, FlatModel, Policy, Transition};
use crate::env::{EnvConfig, EnvState, Environment};
use crate::error::{Error, Result};
use crate::federation::{weighted_average, GlobalModel, RoundCoordinator};
use crate::nn::NetParams;
use crate::seed::{rng_for, Rng, Stream};

/// Everything that shapes a training run apart from the scenario and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainParams {
    pub env: EnvConfig,
    pub agent: AgentConfig,
    pub rounds: usize,
    pub episodes_per_round: usize,
    pub steps_per_episode: usize,
    /// Exploration scale multiplier applied once per communication round.
    pub noise_decay: f64,
    /// Held-out states per MVNO used to score the global model during training.
    pub heldout_states: usize,
}

impl TrainParams {
    /// Full-size profile: 5 rounds x 500 episodes x 50 steps, 400/300 hidden units.
    pub fn full() -> Self {
        let env = EnvConfig::default();
        let agent = AgentConfig {
            f_max: env.f_max,
            ..AgentConfig::default()
        };
        Self {
            env,
            agent,
            rounds: 5,
            episodes_per_round: 500,
            steps_per_episode: 50,
            noise_decay: 0.7,
            heldout_states: 64,
        }
    }

    /// Reduced profile for quick runs: 3 rounds x 100 episodes, 64/48 hidden
    /// units, actor step 1e-5 and soft-update rate 0.01.
    pub fn desk() -> Self {
        let mut p = Self::full();
        p.rounds = 3;
        p.episodes_per_round = 100;
        p.agent.hidden = vec![64, 48];
        p.agent.actor_lr = 1e-5;
        p.agent.tau = 0.01;
        p
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        self.agent.validate()?;
        if self.agent.f_max != self.env.f_max {
            return Err(Error::config("ddpg.f_max", "must equal env.f_max"));
        }
        for (k, v) in [
            ("federation.rounds", self.rounds),
            ("federation.episodes_per_round", self.episodes_per_round),
            ("federation.steps_per_episode", self.steps_per_episode),
            ("federation.heldout_states", self.heldout_states),
        ] {
            if v == 0 {
                return Err(Error::config(k, "must be at least 1"));
            }
        }
        if !(self.noise_decay > 0.0 && self.noise_decay <= 1.0) {
            return Err(Error::config("federation.noise_decay", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Environment steps each MVNO takes over the whole run.
    pub fn env_steps_per_mvno(&self) -> usize {
        self.rounds * self.episodes_per_round * self.steps_per_episode
    }

    pub fn noise_scale_for_round(&self, round: usize) -> f64 {
        self.agent.noise_scale * self.noise_decay.powi(round as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrainMode {
    /// Local training with per-round weighted aggregation.
    Fdrl,
    /// Same loop, no aggregation.
    Local,
}

impl TrainMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TrainMode::Fdrl => "fdrl",
            TrainMode::Local => "local",
        }
    }
}

/// One reward record. `mvno_id == None` marks the global model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRow {
    pub round: usize,
    pub episode: usize,
    pub mvno_id: Option<usize>,
    pub mean_reward: f64,
    pub noise_scale: f64,
    /// Seconds since the start of the run.
    pub wall_clock: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub seed: u64,
    pub mode: TrainMode,
    pub rows: Vec<TrainRow>,
}

impl TrainReport {
    /// Mean of the global-model rows for `round` (1-based).
    pub fn global_round_mean(&self, round: usize) -> Option<f64> {
        mean(self.rows.iter().filter(|r| r.round == round && r.mvno_id.is_none()).map(|r| r.mean_reward))
    }

    /// Global reward recorded at the last episode of `round` (1-based): the
    /// score of the aggregate that round hands to the next.
    pub fn global_round_final(&self, round: usize) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.round == round && r.mvno_id.is_none())
            .max_by_key(|r| r.episode)
            .map(|r| r.mean_reward)
    }

    /// Mean episode reward of one MVNO over `round` (1-based).
    pub fn mvno_round_mean(&self, mvno_id: usize, round: usize) -> Option<f64> {
        mean(
            self.rows
                .iter()
                .filter(|r| r.round == round && r.mvno_id == Some(mvno_id))
                .map(|r| r.mean_reward),
        )
    }

    pub fn has_non_finite(&self) -> bool {
        self.rows.iter().any(|r| !r.mean_reward.is_finite())
    }
}

fn mean(it: impl Iterator<Item = f64>) -> Option<f64> {
    let (s, n) = it.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| s / n as f64)
}

/// Trained models and the reward trace of one run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub report: TrainReport,
    /// Last aggregate; `None` for local-only runs.
    pub global: Option<GlobalModel>,
    /// Each MVNO's own model at the end of its final local phase.
    pub locals: Vec<FlatModel>,
    pub agents: Vec<Agent>,
    /// Aggregates produced at the end of each round.
    pub round_globals: Vec<GlobalModel>,
    /// Each MVNO's model at the end of every local phase, before aggregation.
    pub round_locals: Vec<Vec<FlatModel>>,
}

/// Runs local DDPG per MVNO with weighted aggregation after every round.
pub fn run_fdrl(spec: &ScenarioSpec, params: &TrainParams, seed: u64) -> Result<TrainOutcome> {
    run_training(spec, params, seed, TrainMode::Fdrl)
}

/// Identical loop and seeds to [`run_fdrl`] with aggregation skipped.
pub fn run_local_baseline(spec: &ScenarioSpec, params: &TrainParams, seed: u64) -> Result<TrainOutcome> {
    run_training(spec, params, seed, TrainMode::Local)
}

/// Draws the fixed held-out states (per MVNO) used to score the global model.
pub fn heldout_states(spec: &ScenarioSpec, env: &EnvConfig, n: usize, seed: u64) -> Result<Vec<Vec<EnvState>>> {
    let mut rng = rng_for(seed, Stream::HeldOut);
    let mut out = vec![Vec::with_capacity(n); spec.mvnos.len()];
    for _ in 0..n {
        for (i, m) in spec.mvnos.iter().enumerate() {
            out[i].push(EnvState::sample(m, env, &mut rng)?);
        }
    }
    Ok(out)
}

/// Mean greedy step reward of `policy` over `states`.
pub fn policy_reward(policy: &Policy, states: &[EnvState], env: &EnvConfig) -> Result<f64> {
    if states.is_empty() {
        return Ok(0.0);
    }
    let width = 2 * env.c_max;
    let mut obs = Array2::zeros((states.len(), width));
    for (k, s) in states.iter().enumerate() {
        obs.row_mut(k)
            .iter_mut()
            .zip(s.observation(env).as_slice())
            .for_each(|(d, &v)| *d = v);
    }
    let actions = policy.act_batch(obs.view())?;
    let mut total = 0.0;
    for (k, s) in states.iter().enumerate() {
        let a = crate::env::AllocationAction::new(actions.row(k).to_vec());
        total += s.score(&a, env)?.reward;
    }
    Ok(total / states.len() as f64)
}

fn global_policy(actor: &[f64], params: &TrainParams) -> Result<Policy> {
    Ok(Policy {
        actor: NetParams::unflatten(&params.agent.actor_spec(params.env.c_max), actor)?,
        f_max: params.env.f_max,
    })
}

struct Worker {
    agent: Agent,
    env: Environment<Rng>,
}

impl Worker {
    fn begin_round(&mut self, params: &TrainParams, round: usize) {
        self.agent.reset_round_state();
        self.agent.set_noise_scale(params.noise_scale_for_round(round));
    }

    /// One exploratory episode with a learning step after every transition;
    /// returns the mean step reward.
    fn episode(&mut self, params: &TrainParams, round: usize, episode: usize, mvno: usize) -> Result<f64> {
        let ctx = |source: Error| Error::Training {
            round: round + 1,
            mvno,
            episode: episode + 1,
            source: Box::new(source),
        };
        let mut obs = self.env.reset();
        self.agent.ou.reset();
        let mut total = 0.0;
        for _ in 0..params.steps_per_episode {
            let action = self.agent.act(&obs, true);
            let (outcome, next) = self.env.step(&action).map_err(ctx)?;
            total += outcome.reward;
            self.agent.store(Transition {
                state: obs,
                action,
                reward: outcome.reward,
                next_state: next.clone(),
            });
            self.agent.train_step().map_err(ctx)?;
            obs = next;
        }
        Ok(total / params.steps_per_episode as f64)
    }
}

/// Mean held-out reward (averaged over MVNOs) of the user-weighted average
/// of the workers' current actors.
fn score_global(workers: &[Worker], mvnos: &[(usize, usize)], heldout: &[Vec<EnvState>], params: &TrainParams) -> Result<f64> {
    let actors: Vec<Vec<f64>> = workers.iter().map(|w| w.agent.params.actor.flatten()).collect();
    let parts: Vec<(&[f64], usize)> = actors.iter().zip(mvnos).map(|(a, &(_, c))| (a.as_slice(), c)).collect();
    let policy = global_policy(&weighted_average(&parts)?, params)?;
    let per_mvno = heldout
        .iter()
        .map(|states| policy_reward(&policy, states, &params.env))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_mvno.iter().sum::<f64>() / per_mvno.len() as f64)
}

fn run_training(spec: &ScenarioSpec, params: &TrainParams, seed: u64, mode: TrainMode) -> Result<TrainOutcome> {
    params.validate()?;
    spec.validate(&params.env)?;
    let start = Instant::now();
    let c_max = params.env.c_max;

    // Central initialization shared by every MVNO (and by both modes).
    let init = AgentParams::init(&params.agent, c_max, &mut rng_for(seed, Stream::Init))?;
    let mut workers = spec
        .mvnos
        .iter()
        .enumerate()
        .map(|(i, m)| {
            Ok(Worker {
                agent: Agent::new(params.agent.clone(), c_max, init.clone(), rng_for(seed, Stream::Agent(i)))?,
                env: Environment::new(params.env.clone(), m.clone(), rng_for(seed, Stream::Env(i)))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let heldout = match mode {
        TrainMode::Fdrl => heldout_states(spec, &params.env, params.heldout_states, seed)?,
        TrainMode::Local => Vec::new(),
    };

    let mvnos = spec.user_counts();
    let mut coordinator = RoundCoordinator::new();
    let mut round_globals = Vec::new();
    let mut round_locals = Vec::with_capacity(params.rounds);
    let mut rows = Vec::new();

    for round in 0..params.rounds {
        let noise = params.noise_scale_for_round(round);
        workers.iter_mut().for_each(|w| w.begin_round(params, round));
        for episode in 0..params.episodes_per_round {
            let means = workers
                .par_iter_mut()
                .zip(spec.mvnos.par_iter())
                .map(|(w, m)| w.episode(params, round, episode, m.mvno_id))
                .collect::<Result<Vec<_>>>()?;
            let wall_clock = start.elapsed().as_secs_f64();
            for (m, mean_reward) in spec.mvnos.iter().zip(means) {
                rows.push(TrainRow {
                    round: round + 1,
                    episode: episode + 1,
                    mvno_id: Some(m.mvno_id),
                    mean_reward,
                    noise_scale: noise,
                    wall_clock,
                });
            }
            // The global curve scores the aggregate the coordinator would
            // form from the current local actors; at the last episode of a
            // round this is exactly the round's aggregate.
            if mode == TrainMode::Fdrl {
                rows.push(TrainRow {
                    round: round + 1,
                    episode: episode + 1,
                    mvno_id: None,
                    mean_reward: score_global(&workers, &mvnos, &heldout, params)?,
                    noise_scale: noise,
                    wall_clock,
                });
            }
        }

        round_locals.push(workers.iter().map(|w| w.agent.export_params()).collect::<Vec<_>>());
        if mode == TrainMode::Fdrl {
            let mut agents: Vec<Agent> = workers.iter().map(|w| w.agent.clone()).collect();
            round_globals.push(coordinator.complete_round(&mut agents, &mvnos)?);
            for (w, a) in workers.iter_mut().zip(agents) {
                w.agent = a;
            }
        }
    }

    Ok(TrainOutcome {
        report: TrainReport { seed, mode, rows },
        global: round_globals.last().cloned(),
        locals: round_locals.last().cloned().unwrap_or_default(),
        agents: workers.into_iter().map(|w| w.agent).collect(),
        round_globals,
        round_locals,
    })
}
