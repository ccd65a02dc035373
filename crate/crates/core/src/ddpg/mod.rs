//! DDPG learner: actor/critic with target networks, replay memory and
//! Ornstein-Uhlenbeck exploration.

mod agent;
mod noise;
mod replay;

pub use agent::{
    Agent, AgentConfig, AgentParams, Batch, FlatModel, Policy, TrainDiagnostics, TrainOutcome,
};
pub use noise::OuProcess;
pub use replay::{ReplayBuffer, Transition};
