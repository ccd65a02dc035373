//! Wireless environment of a single MVNO: users, channel, rate/delay
//! physics, SLA checks and the step reward.

mod config;
mod environment;
mod observation;
pub mod physics;
mod reward;

pub use config::{EnvConfig, MvnoScenario, User, UserType};
pub use environment::{draw_gains, spawn_users, EnvState, Environment};
pub use observation::{encode_observation, gain_feature, AllocationAction, Observation};
pub use physics::{channel_gain, data_rate, snr, tx_delay};
pub use reward::{
    per_user_reward, score_allocation, validate_action, StepOutcome, ValidityReport, Violations,
    INVALID_REWARD, PADDING_PENALTY,
};
