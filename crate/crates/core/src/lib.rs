//! Federated DDPG for RAN slice bandwidth allocation.
//!
//! Each MVNO runs a DDPG agent that maps a zero-padded observation of its
//! users' channel gains and service types to per-user bandwidth fractions.
//! Agents train locally and are periodically merged by a user-count-weighted
//! average of their parameters.
//!
//! - [`env`]: per-MVNO radio environment and SLA-aware reward
//! - [`nn`]: dense networks, backprop, Adam
//! - [`ddpg`]: replay buffer, OU exploration, the DDPG learner
//! - [`federation`]: weighted aggregation and broadcast
//! - [`harness`]: training loops, evaluation campaigns, brute-force oracle
//! - [`io`]: run configuration, checkpoints, CSV reports, CLI commands

pub mod ddpg;
pub mod env;
pub mod error;
pub mod federation;
pub mod harness;
pub mod io;
pub mod nn;
pub mod seed;

pub use error::{Error, Result};
