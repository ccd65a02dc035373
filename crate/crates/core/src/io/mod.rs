//! Run configuration, checkpoints, CSV reports and the command entry points.

mod checkpoint;
mod commands;
mod config;
mod reports;

pub use checkpoint::{Checkpoint, FORMAT_VERSION};
pub use commands::{
    cmd_evaluate, cmd_inspect, cmd_oracle, cmd_train, oracle_states, EvaluateArgs, Manifest, OracleArgs, TrainArgs,
    CHECKPOINT_DIR, DEFAULT_GRID_STEP, DEFAULT_N_OBS, DEFAULT_ORACLE_STATES, EFFECTIVE_CONFIG, EVAL_REPORT,
    MANIFEST, ORACLE_REPORT, TRAIN_REPORT,
};
pub use config::{load_config, FederationConfig, RunConfig, ScenarioRef};
pub use reports::{write_eval_report, write_oracle_report, write_train_report, OracleRow, EVAL_HEADER, ORACLE_HEADER, TRAIN_HEADER};
