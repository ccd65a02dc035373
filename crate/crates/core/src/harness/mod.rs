//! End-to-end experiment driver: scenarios, federated and local-only
//! training, SLA-violation campaigns and the brute-force allocation oracle.

mod eval;
mod oracle;
mod scenario;
mod train;

pub use eval::{evaluate, evaluation_states, EvalCell, EvalReport, NamedPolicy};
pub use oracle::{
    fraction_grid, grid_resolution, oracle_allocate, oracle_allocate_with_budget, oracle_for_state, OracleResult,
    DEFAULT_NODE_BUDGET,
};
pub use scenario::{scenario_by_name, scenario_catalog, ScenarioSpec};
pub use train::{
    heldout_states, policy_reward, run_fdrl, run_local_baseline, TrainMode, TrainOutcome, TrainParams, TrainReport,
    TrainRow,
};
