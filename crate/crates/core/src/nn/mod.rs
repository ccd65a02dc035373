//! Dense feed-forward networks with analytic backprop and Adam.

mod adam;
mod network;

pub use adam::{adam_step, AdamState};
pub use network::{
    mlp_spec, soft_update, spec_param_count, validate_spec, Activation, Dense, ForwardCache, Gradients,
    LayerSpec, NetParams,
};
