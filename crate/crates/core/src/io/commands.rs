//! The four command-line operations, callable as library functions.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::checkpoint::Checkpoint;
use super::config::{load_config, RunConfig, ScenarioRef};
use super::reports::{write_eval_report, write_oracle_report, write_train_report, OracleRow};
use crate::env::EnvState;
use crate::error::{Error, Result};
use crate::harness::{evaluate, oracle_for_state, run_fdrl, run_local_baseline, NamedPolicy, TrainMode};
use crate::seed::{rng_for, Stream};

pub const TRAIN_REPORT: &str = "train_report.csv";
pub const EVAL_REPORT: &str = "eval_report.csv";
pub const ORACLE_REPORT: &str = "oracle_report.csv";
pub const MANIFEST: &str = "manifest.json";
pub const EFFECTIVE_CONFIG: &str = "config.toml";
pub const CHECKPOINT_DIR: &str = "checkpoints";

/// Default observation count of an evaluation campaign.
pub const DEFAULT_N_OBS: usize = 20_000;
pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const DEFAULT_ORACLE_STATES: usize = 100;

#[derive(Debug, Clone, Default)]
pub struct TrainArgs {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub mode: Option<TrainMode>,
    pub out: Option<PathBuf>,
    pub scenario: Option<String>,
}

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub checkpoints: Vec<PathBuf>,
    pub config: Option<PathBuf>,
    pub scenario: Option<String>,
    pub n_obs: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct OracleArgs {
    pub config: Option<PathBuf>,
    pub scenario: Option<String>,
    pub grid_step: f64,
    pub n_states: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Record per-state search time. Off by default so reruns are byte-identical.
    pub timing: bool,
}

/// Written next to the training outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub package: String,
    pub version: String,
    pub config_digest: String,
    pub mode: TrainMode,
    pub scenario: String,
    pub seeds: Vec<u64>,
    pub files: Vec<String>,
}

fn resolve(config: Option<&Path>) -> Result<RunConfig> {
    match config {
        Some(path) => load_config(path),
        None => Ok(RunConfig::default()),
    }
}

fn apply_overrides(
    cfg: &mut RunConfig,
    seed: Option<u64>,
    scenario: Option<&str>,
    out: Option<&Path>,
) -> Result<()> {
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    if let Some(name) = scenario {
        cfg.scenario = ScenarioRef::Named(name.to_string());
    }
    if let Some(dir) = out {
        cfg.output_dir = dir.to_path_buf();
    }
    cfg.validate()
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn checkpoint_name(mode: TrainMode, seed: u64, round: usize, model: &str) -> String {
    format!("{}-seed{seed}-round{round}-{model}.ckpt", mode.as_str())
}

/// Trains every configured seed and writes the report, per-round
/// checkpoints, the effective config and a manifest into the output directory.
pub fn cmd_train(args: &TrainArgs) -> Result<Manifest> {
    let mut cfg = resolve(args.config.as_deref())?;
    if let Some(mode) = args.mode {
        cfg.federation.aggregate = mode == TrainMode::Fdrl;
    }
    apply_overrides(&mut cfg, args.seed, args.scenario.as_deref(), args.out.as_deref())?;
    let spec = cfg.scenario_spec()?;
    let params = cfg.train_params();
    let mode = cfg.mode();
    let digest = cfg.digest()?;

    let out = cfg.output_dir.clone();
    let ckpt_dir = out.join(CHECKPOINT_DIR);
    fs::create_dir_all(&ckpt_dir)?;
    let mut files = vec![EFFECTIVE_CONFIG.to_string(), TRAIN_REPORT.to_string()];
    fs::write(out.join(EFFECTIVE_CONFIG), cfg.to_toml()?)?;

    let actor_spec = params.agent.actor_spec(params.env.c_max);
    let critic_spec = params.agent.critic_spec(params.env.c_max);
    let mut reports = Vec::with_capacity(cfg.seeds.len());
    for &seed in &cfg.seeds {
        let outcome = match mode {
            TrainMode::Fdrl => run_fdrl(&spec, &params, seed)?,
            TrainMode::Local => run_local_baseline(&spec, &params, seed)?,
        };
        let mut snapshots = Vec::new();
        match mode {
            TrainMode::Fdrl => {
                for (r, g) in outcome.round_globals.iter().enumerate() {
                    snapshots.push((r + 1, "global".to_string(), g.payload.clone()));
                }
            }
            TrainMode::Local => {
                for (r, models) in outcome.round_locals.iter().enumerate() {
                    for (m, flat) in spec.mvnos.iter().zip(models) {
                        snapshots.push((r + 1, format!("mvno{}", m.mvno_id), flat.clone()));
                    }
                }
            }
        }
        for (round, model, payload) in snapshots {
            let name = checkpoint_name(mode, seed, round, &model);
            Checkpoint {
                model,
                round,
                seed,
                f_max: params.env.f_max,
                config_digest: digest.clone(),
                actor_spec: actor_spec.clone(),
                critic_spec: critic_spec.clone(),
                payload,
            }
            .save(&ckpt_dir.join(&name))?;
            files.push(format!("{CHECKPOINT_DIR}/{name}"));
        }
        reports.push(outcome.report);
    }
    write_train_report(create_file(&out.join(TRAIN_REPORT))?, &reports)?;

    files.push(MANIFEST.to_string());
    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: digest,
        mode,
        scenario: spec.name.clone(),
        seeds: cfg.seeds.clone(),
        files,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(out.join(MANIFEST), json)?;
    Ok(manifest)
}

/// Runs an SLA-violation campaign for the given checkpoints and writes
/// `eval_report.csv`. Models are labelled by checkpoint file stem.
pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<PathBuf> {
    if args.checkpoints.is_empty() {
        return Err(Error::config("checkpoints", "at least one checkpoint required"));
    }
    let mut cfg = resolve(args.config.as_deref())?;
    apply_overrides(&mut cfg, args.seed, args.scenario.as_deref(), args.out.as_deref())?;
    let spec = cfg.scenario_spec()?;

    let mut models = Vec::with_capacity(args.checkpoints.len());
    for path in &args.checkpoints {
        let ckpt = Checkpoint::load(path)?;
        if ckpt.f_max != cfg.env.f_max {
            return Err(Error::Checkpoint {
                path: path.clone(),
                reason: format!("trained with f_max {} but env uses {}", ckpt.f_max, cfg.env.f_max),
            });
        }
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| ckpt.model.clone());
        models.push(NamedPolicy {
            id,
            policy: ckpt.policy()?,
        });
    }

    let reports = cfg
        .seeds
        .iter()
        .map(|&seed| evaluate(&models, &spec, &cfg.env, args.n_obs, seed))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(EVAL_REPORT);
    write_eval_report(create_file(&path)?, &reports)?;
    Ok(path)
}

/// States for the oracle report: state `k` belongs to MVNO `k mod M`.
pub fn oracle_states(cfg: &RunConfig, n_states: usize, seed: u64) -> Result<Vec<EnvState>> {
    let spec = cfg.scenario_spec()?;
    let mut rng = rng_for(seed, Stream::Oracle);
    (0..n_states)
        .map(|k| EnvState::sample(&spec.mvnos[k % spec.mvnos.len()], &cfg.env, &mut rng))
        .collect()
}

/// Solves `n_states` sampled states exhaustively and writes `oracle_report.csv`.
pub fn cmd_oracle(args: &OracleArgs) -> Result<PathBuf> {
    let mut cfg = resolve(args.config.as_deref())?;
    apply_overrides(&mut cfg, args.seed, args.scenario.as_deref(), args.out.as_deref())?;
    let seed = cfg.seeds[0];
    let states = oracle_states(&cfg, args.n_states, seed)?;
    let mut rows = Vec::with_capacity(states.len());
    for (state_id, state) in states.iter().enumerate() {
        let start = Instant::now();
        let best = oracle_for_state(state, &cfg.env, args.grid_step)?;
        let elapsed = start.elapsed().as_secs_f64();
        rows.push(OracleRow {
            state_id,
            best_reward: best.reward,
            best_fractions: best.fractions,
            wall_clock: args.timing.then_some(elapsed),
        });
    }
    fs::create_dir_all(&cfg.output_dir)?;
    let path = cfg.output_dir.join(ORACLE_REPORT);
    write_oracle_report(create_file(&path)?, &rows)?;
    Ok(path)
}

/// Header summary of a checkpoint file.
pub fn cmd_inspect(path: &Path) -> Result<String> {
    Ok(Checkpoint::load(path)?.describe())
}
