use rand::Rng;

use super::config::{EnvConfig, MvnoScenario, User, UserType};
use super::observation::{encode_observation, AllocationAction, Observation};
use super::physics::channel_gain;
use super::reward::{score_allocation, StepOutcome};
use crate::error::{Error, Result};

/// Draws the MVNO's user population: types by `urllc_prob`, positions uniform
/// over the coverage square.
pub fn spawn_users<R: Rng + ?Sized>(
    scenario: &MvnoScenario,
    config: &EnvConfig,
    rng: &mut R,
) -> Result<Vec<User>> {
    if scenario.n_users > config.c_max {
        return Err(Error::config(
            format!("scenario.mvno[{}].n_users", scenario.mvno_id),
            format!("{} exceeds c_max = {}", scenario.n_users, config.c_max),
        ));
    }
    let users = (0..scenario.n_users)
        .map(|id| {
            let kind = if rng.random::<f64>() < scenario.urllc_prob {
                UserType::Urllc
            } else {
                UserType::Embb
            };
            let position = [
                rng.random::<f64>() * config.cell_side,
                rng.random::<f64>() * config.cell_side,
            ];
            User {
                id,
                kind,
                position,
                tx_power: config.tx_power,
                packet_bits: config.packet_bits(kind),
            }
        })
        .collect();
    Ok(users)
}

pub fn draw_gains<R: Rng + ?Sized>(users: &[User], config: &EnvConfig, rng: &mut R) -> Vec<f64> {
    users.iter().map(|u| channel_gain(u, config, rng)).collect()
}

/// A frozen snapshot of one MVNO's radio situation.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub users: Vec<User>,
    pub gains: Vec<f64>,
    pub leased_bandwidth: f64,
}

impl EnvState {
    /// Fresh users and gains, independent of any previous draw.
    pub fn sample<R: Rng + ?Sized>(scenario: &MvnoScenario, config: &EnvConfig, rng: &mut R) -> Result<Self> {
        let users = spawn_users(scenario, config, rng)?;
        let gains = draw_gains(&users, config, rng);
        Ok(Self {
            users,
            gains,
            leased_bandwidth: scenario.leased_bandwidth,
        })
    }

    pub fn observation(&self, config: &EnvConfig) -> Observation {
        encode_observation(&self.users, &self.gains, config).expect("state respects c_max")
    }

    /// Clips the action to the box and scores it without touching any state.
    pub fn score(&self, action: &AllocationAction, config: &EnvConfig) -> Result<StepOutcome> {
        if action.len() != config.c_max {
            return Err(Error::contract(format!(
                "action length {} != c_max = {}",
                action.len(),
                config.c_max
            )));
        }
        let clipped = action.clipped(config.f_max);
        Ok(score_allocation(
            &clipped.fractions,
            &self.users,
            &self.gains,
            self.leased_bandwidth,
            config,
        ))
    }
}

/// Step-based simulator for one MVNO.
///
/// Gains are redrawn on every step. The user population (types and
/// positions) is redrawn at the start of every `position_reset_episodes`-th
/// episode.
#[derive(Debug, Clone)]
pub struct Environment<R: Rng> {
    config: EnvConfig,
    scenario: MvnoScenario,
    state: EnvState,
    rng: R,
    episodes: usize,
}

impl<R: Rng> Environment<R> {
    pub fn new(config: EnvConfig, scenario: MvnoScenario, mut rng: R) -> Result<Self> {
        config.validate()?;
        scenario.validate(&config)?;
        let state = EnvState::sample(&scenario, &config, &mut rng)?;
        Ok(Self {
            config,
            scenario,
            state,
            rng,
            episodes: 0,
        })
    }

    /// Starts a new episode and returns its first observation.
    pub fn reset(&mut self) -> Observation {
        if self.episodes > 0 && self.episodes % self.config.position_reset_episodes == 0 {
            self.state.users =
                spawn_users(&self.scenario, &self.config, &mut self.rng).expect("validated scenario");
        }
        self.episodes += 1;
        self.redraw_gains();
        self.observe()
    }

    pub fn observe(&self) -> Observation {
        self.state.observation(&self.config)
    }

    /// Applies `action`, then redraws the channel for the next observation.
    pub fn step(&mut self, action: &AllocationAction) -> Result<(StepOutcome, Observation)> {
        let outcome = self.state.score(action, &self.config)?;
        self.redraw_gains();
        Ok((outcome, self.observe()))
    }

    fn redraw_gains(&mut self) {
        self.state.gains = draw_gains(&self.state.users, &self.config, &mut self.rng);
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn scenario(&self) -> &MvnoScenario {
        &self.scenario
    }

    pub fn episodes_started(&self) -> usize {
        self.episodes
    }
}
