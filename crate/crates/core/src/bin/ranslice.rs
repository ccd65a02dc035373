use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ranslice::harness::TrainMode;
use ranslice::io::{self, EvaluateArgs, OracleArgs, TrainArgs};

#[derive(Parser)]
#[command(name = "ranslice", version, about = "Federated DDPG bandwidth slicing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Fdrl,
    Local,
}

#[derive(Subcommand)]
enum Command {
    /// Train per-MVNO agents, with or without aggregation.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Count SLA violations of saved models on freshly drawn states.
    Evaluate {
        #[arg(required = true)]
        checkpoints: Vec<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = io::DEFAULT_N_OBS)]
        n_obs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Best grid allocation for sampled states.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long, default_value_t = io::DEFAULT_GRID_STEP)]
        grid_step: f64,
        #[arg(long, default_value_t = io::DEFAULT_ORACLE_STATES)]
        n_states: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fill the wall_clock column.
        #[arg(long)]
        timing: bool,
    },
    /// Print a checkpoint header.
    InspectCheckpoint { path: PathBuf },
}

fn run(cli: Cli) -> ranslice::Result<()> {
    match cli.command {
        Command::Train {
            config,
            seed,
            mode,
            out,
            scenario,
        } => {
            let manifest = io::cmd_train(&TrainArgs {
                config,
                seed,
                mode: mode.map(|m| match m {
                    Mode::Fdrl => TrainMode::Fdrl,
                    Mode::Local => TrainMode::Local,
                }),
                out,
                scenario,
            })?;
            println!(
                "trained {} on {} for seeds {:?}; wrote {} files",
                manifest.mode.as_str(),
                manifest.scenario,
                manifest.seeds,
                manifest.files.len()
            );
        }
        Command::Evaluate {
            checkpoints,
            config,
            scenario,
            n_obs,
            seed,
            out,
        } => {
            let path = io::cmd_evaluate(&EvaluateArgs {
                checkpoints,
                config,
                scenario,
                n_obs,
                seed,
                out,
            })?;
            println!("wrote {}", path.display());
        }
        Command::Oracle {
            config,
            scenario,
            grid_step,
            n_states,
            seed,
            out,
            timing,
        } => {
            let path = io::cmd_oracle(&OracleArgs {
                config,
                scenario,
                grid_step,
                n_states,
                seed,
                out,
                timing,
            })?;
            println!("wrote {}", path.display());
        }
        Command::InspectCheckpoint { path } => print!("{}", io::cmd_inspect(&path)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
