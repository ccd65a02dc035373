use ndarray::{s, Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::OuProcess;
use super::replay::{ReplayBuffer, Transition};
use crate::env::{AllocationAction, Observation};
use crate::error::{Error, Result};
use crate::nn::{adam_step, mlp_spec, Activation, AdamState, Gradients, LayerSpec, NetParams};
use crate::seed::Rng as SeededRng;

/// DDPG hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentConfig {
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub gamma: f64,
    pub tau: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Multiplier on the absolute OU sample added to actions while exploring.
    pub noise_scale: f64,
    /// Hidden widths shared by actor and critic.
    pub hidden: Vec<usize>,
    pub ou_theta: f64,
    pub ou_mu: f64,
    pub ou_sigma: f64,
    /// Global-norm gradient clip applied before every Adam step.
    pub grad_clip: f64,
    /// Rewards are multiplied by this before entering the Bellman target.
    pub reward_scale: f64,
    /// Actor head scale; taken from the environment's `f_max`.
    #[serde(skip)]
    pub f_max: f64,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            gamma: 0.99,
            tau: 0.001,
            batch_size: 128,
            buffer_capacity: 100_000,
            noise_scale: 0.1,
            hidden: vec![400, 300],
            ou_theta: 0.15,
            ou_mu: 0.0,
            ou_sigma: 0.2,
            grad_clip: 1.0,
            reward_scale: 1.0,
            f_max: 0.3,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |k: &str, r: &str| Err(Error::config(format!("ddpg.{k}"), r.to_string()));
        if !(self.actor_lr > 0.0 && self.actor_lr.is_finite()) {
            return bad("actor_lr", "must be positive");
        }
        if !(self.critic_lr > 0.0 && self.critic_lr.is_finite()) {
            return bad("critic_lr", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma", "must lie in [0, 1]");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return bad("tau", "must lie in (0, 1]");
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be at least 1");
        }
        if self.batch_size > self.buffer_capacity {
            return bad("batch_size", "must not exceed buffer_capacity");
        }
        if !(self.noise_scale >= 0.0) {
            return bad("noise_scale", "must be non-negative");
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return bad("hidden", "widths must be positive");
        }
        if !(self.ou_theta >= 0.0 && self.ou_sigma >= 0.0) {
            return bad("ou_theta", "theta and sigma must be non-negative");
        }
        if !(self.grad_clip > 0.0) {
            return bad("grad_clip", "must be positive");
        }
        if !(self.reward_scale > 0.0 && self.reward_scale.is_finite()) {
            return bad("reward_scale", "must be positive");
        }
        if !(self.f_max > 0.0 && self.f_max <= 1.0) {
            return bad("f_max", "must lie in (0, 1]");
        }
        Ok(())
    }

    /// `2 c_max -> hidden... -> c_max`, sigmoid head.
    pub fn actor_spec(&self, c_max: usize) -> Vec<LayerSpec> {
        mlp_spec(2 * c_max, &self.hidden, c_max, Activation::Sigmoid)
    }

    /// `(observation ++ action) -> hidden... -> 1`.
    pub fn critic_spec(&self, c_max: usize) -> Vec<LayerSpec> {
        mlp_spec(3 * c_max, &self.hidden, 1, Activation::Identity)
    }
}

/// Deterministic policy: actor network with its output scaled by `f_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub actor: NetParams,
    pub f_max: f64,
}

impl Policy {
    pub fn act(&self, obs: &Observation) -> AllocationAction {
        let mut out = self.actor.forward_one(obs.as_slice()).expect("observation width matches actor");
        out.iter_mut().for_each(|v| *v *= self.f_max);
        AllocationAction::new(out)
    }

    /// Greedy actions for a batch of observations, one per row.
    pub fn act_batch(&self, obs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = self.actor.forward(obs)?.into_output();
        out.mapv_inplace(|v| v * self.f_max);
        Ok(out)
    }
}

/// The four DDPG networks.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentParams {
    pub actor: NetParams,
    pub critic: NetParams,
    pub actor_target: NetParams,
    pub critic_target: NetParams,
}

impl AgentParams {
    /// Fresh networks with targets equal to their online counterparts.
    pub fn init<R: Rng + ?Sized>(config: &AgentConfig, c_max: usize, rng: &mut R) -> Result<Self> {
        let actor = NetParams::init(&config.actor_spec(c_max), rng)?;
        let critic = NetParams::init(&config.critic_spec(c_max), rng)?;
        Ok(Self {
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
        })
    }

    pub fn flatten(&self) -> FlatModel {
        FlatModel {
            actor: self.actor.flatten(),
            critic: self.critic.flatten(),
            actor_target: self.actor_target.flatten(),
            critic_target: self.critic_target.flatten(),
        }
    }

    /// Replaces all four networks from `flat`; fails without modifying
    /// anything on a length mismatch.
    pub fn load(&mut self, flat: &FlatModel) -> Result<()> {
        let pairs = [
            (self.actor.param_count(), flat.actor.len(), "actor"),
            (self.critic.param_count(), flat.critic.len(), "critic"),
            (self.actor_target.param_count(), flat.actor_target.len(), "actor_target"),
            (self.critic_target.param_count(), flat.critic_target.len(), "critic_target"),
        ];
        for (want, got, name) in pairs {
            if want != got {
                return Err(Error::contract(format!("{name}: expected {want} parameters, got {got}")));
            }
        }
        self.actor.load_flat(&flat.actor)?;
        self.critic.load_flat(&flat.critic)?;
        self.actor_target.load_flat(&flat.actor_target)?;
        self.critic_target.load_flat(&flat.critic_target)?;
        Ok(())
    }
}

/// Flat parameter vectors of the four networks in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatModel {
    pub actor: Vec<f64>,
    pub critic: Vec<f64>,
    pub actor_target: Vec<f64>,
    pub critic_target: Vec<f64>,
}

impl FlatModel {
    pub fn parts(&self) -> [&[f64]; 4] {
        [&self.actor, &self.critic, &self.actor_target, &self.critic_target]
    }

    pub fn lengths(&self) -> [usize; 4] {
        self.parts().map(<[f64]>::len)
    }
}

/// A sampled minibatch laid out as matrices.
#[derive(Debug, Clone)]
pub struct Batch {
    pub states: Array2<f64>,
    pub actions: Array2<f64>,
    pub rewards: Array1<f64>,
    pub next_states: Array2<f64>,
}

impl Batch {
    pub fn from_transitions<'a, I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Transition>,
    {
        let items: Vec<&Transition> = items.into_iter().collect();
        let first = items.first().ok_or_else(|| Error::contract("empty batch"))?;
        let (ds, da) = (first.state.as_slice().len(), first.action.len());
        let n = items.len();
        let mut states = Array2::zeros((n, ds));
        let mut actions = Array2::zeros((n, da));
        let mut next_states = Array2::zeros((n, ds));
        let mut rewards = Array1::zeros(n);
        for (k, t) in items.iter().enumerate() {
            if t.state.as_slice().len() != ds || t.next_state.as_slice().len() != ds || t.action.len() != da {
                return Err(Error::contract("inconsistent transition widths in batch"));
            }
            states.row_mut(k).assign(&ArrayView2::from_shape((1, ds), t.state.as_slice()).unwrap().row(0));
            next_states
                .row_mut(k)
                .assign(&ArrayView2::from_shape((1, ds), t.next_state.as_slice()).unwrap().row(0));
            actions
                .row_mut(k)
                .assign(&ArrayView2::from_shape((1, da), &t.action.fractions).unwrap().row(0));
            rewards[k] = t.reward;
        }
        Ok(Self {
            states,
            actions,
            rewards,
            next_states,
        })
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }
}

/// Pre-update losses of one training step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainDiagnostics {
    pub critic_loss: f64,
    /// Mean critic value of the actor's own actions (the quantity the actor ascends).
    pub actor_objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainOutcome {
    /// The replay buffer holds fewer than `batch_size` transitions.
    NotReady,
    Trained(TrainDiagnostics),
}

fn concat_cols(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(1), &[a.view(), b.view()]).expect("row counts match")
}

/// One MVNO's DDPG learner.
#[derive(Debug, Clone)]
pub struct Agent {
    pub params: AgentParams,
    pub actor_opt: AdamState,
    pub critic_opt: AdamState,
    pub buffer: ReplayBuffer,
    pub ou: OuProcess,
    config: AgentConfig,
    c_max: usize,
    noise_scale: f64,
    rng: SeededRng,
}

impl Agent {
    pub fn new(config: AgentConfig, c_max: usize, params: AgentParams, rng: SeededRng) -> Result<Self> {
        config.validate()?;
        if params.actor.spec() != config.actor_spec(c_max) || params.critic.spec() != config.critic_spec(c_max) {
            return Err(Error::contract("network shapes do not match agent configuration"));
        }
        if params.actor_target.spec() != params.actor.spec() || params.critic_target.spec() != params.critic.spec() {
            return Err(Error::contract("target networks must match their online networks"));
        }
        Ok(Self {
            actor_opt: AdamState::new(&params.actor),
            critic_opt: AdamState::new(&params.critic),
            buffer: ReplayBuffer::new(config.buffer_capacity),
            ou: OuProcess::new(c_max, config.ou_theta, config.ou_mu, config.ou_sigma),
            noise_scale: config.noise_scale,
            params,
            config,
            c_max,
            rng,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn c_max(&self) -> usize {
        self.c_max
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    pub fn set_noise_scale(&mut self, scale: f64) {
        self.noise_scale = scale;
    }

    pub fn policy(&self) -> Policy {
        Policy {
            actor: self.params.actor.clone(),
            f_max: self.config.f_max,
        }
    }

    /// Actor output, plus `noise_scale * |OU|` when exploring, kept in `[0, f_max]`.
    pub fn act(&mut self, obs: &Observation, explore: bool) -> AllocationAction {
        let f_max = self.config.f_max;
        let mut out = self
            .params
            .actor
            .forward_one(obs.as_slice())
            .expect("observation width matches actor");
        out.iter_mut().for_each(|v| *v *= f_max);
        if explore {
            let noise = self.ou.sample(&mut self.rng);
            for (a, n) in out.iter_mut().zip(noise) {
                *a += self.noise_scale * n;
            }
        }
        out.iter_mut().for_each(|v| *v = v.clamp(0.0, f_max));
        AllocationAction::new(out)
    }

    pub fn store(&mut self, t: Transition) {
        self.buffer.store(t);
    }

    /// Empties replay memory and zeroes both optimizers' moments.
    pub fn reset_round_state(&mut self) {
        self.buffer.clear();
        self.actor_opt.reset();
        self.critic_opt.reset();
    }

    pub fn sample(&mut self, n: usize) -> Option<Batch> {
        let items = self.buffer.sample(n, &mut self.rng)?;
        Some(Batch::from_transitions(items).expect("buffer holds consistent transitions"))
    }

    /// Bellman targets `scale * r + gamma * Q'(s', mu'(s'))`.
    pub fn compute_targets(&self, batch: &Batch) -> Result<Array1<f64>> {
        let mut next_actions = self.params.actor_target.forward(batch.next_states.view())?.into_output();
        next_actions.mapv_inplace(|v| v * self.config.f_max);
        let q_next = self
            .params
            .critic_target
            .forward(concat_cols(&batch.next_states, &next_actions).view())?
            .into_output();
        let q_next = q_next.column(0);
        Ok(&batch.rewards * self.config.reward_scale + &(&q_next * self.config.gamma))
    }

    /// Mean-square Bellman error and its gradient w.r.t. the critic.
    pub fn critic_gradient(&self, batch: &Batch, targets: &Array1<f64>) -> Result<(f64, Gradients)> {
        let n = batch.len() as f64;
        let critic = &self.params.critic;
        let cache = critic.forward(concat_cols(&batch.states, &batch.actions).view())?;
        let q = cache.output().column(0).to_owned();
        let err = targets - &q;
        let loss = err.mapv(|e| e * e).sum() / n;
        let dq = err.mapv(|e| -2.0 * e / n).insert_axis(Axis(1));
        let (grads, _) = critic.backward(&cache, dq.view())?;
        Ok((loss, grads))
    }

    /// Actor loss `-mean Q(s, mu(s))` and its gradient w.r.t. the actor,
    /// backpropagated through the critic.
    pub fn actor_gradient(&self, states: ArrayView2<'_, f64>) -> Result<(f64, Gradients)> {
        let n = states.nrows() as f64;
        let f_max = self.config.f_max;
        let actor_cache = self.params.actor.forward(states)?;
        let actions = actor_cache.output().mapv(|v| v * f_max);
        let critic_cache = self
            .params
            .critic
            .forward(concat_cols(&states.to_owned(), &actions).view())?;
        let loss = -critic_cache.output().sum() / n;
        let dq = Array2::from_elem((states.nrows(), 1), -1.0 / n);
        let (_, d_input) = self.params.critic.backward(&critic_cache, dq.view())?;
        let d_action = d_input.slice(s![.., states.ncols()..]).mapv(|v| v * f_max);
        let (grads, _) = self.params.actor.backward(&actor_cache, d_action.view())?;
        Ok((loss, grads))
    }

    /// Critic update on a caller-supplied batch; returns the pre-update loss.
    pub fn critic_step(&mut self, batch: &Batch) -> Result<f64> {
        let targets = self.compute_targets(batch)?;
        let (loss, mut grads) = self.critic_gradient(batch, &targets)?;
        grads.clip_global_norm(self.config.grad_clip);
        adam_step(&mut self.params.critic, &grads, &mut self.critic_opt, self.config.critic_lr)?;
        Ok(loss)
    }

    /// Critic step, actor step, then soft target updates.
    pub fn train_step(&mut self) -> Result<TrainOutcome> {
        let Some(batch) = self.sample(self.config.batch_size) else {
            return Ok(TrainOutcome::NotReady);
        };
        let critic_loss = self.critic_step(&batch)?;

        let (actor_loss, mut grads) = self.actor_gradient(batch.states.view())?;
        grads.clip_global_norm(self.config.grad_clip);
        adam_step(&mut self.params.actor, &grads, &mut self.actor_opt, self.config.actor_lr)?;

        let tau = self.config.tau;
        let p = &mut self.params;
        p.actor_target.soft_update_from(&p.actor, tau)?;
        p.critic_target.soft_update_from(&p.critic, tau)?;
        Ok(TrainOutcome::Trained(TrainDiagnostics {
            critic_loss,
            actor_objective: -actor_loss,
        }))
    }

    pub fn export_params(&self) -> FlatModel {
        self.params.flatten()
    }

    /// Replaces the four networks; optimizer, buffer and noise state are kept.
    pub fn import_params(&mut self, flat: &FlatModel) -> Result<()> {
        self.params.load(flat)
    }
}
