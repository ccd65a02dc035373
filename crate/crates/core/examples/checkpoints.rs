//! Trains a tiny federated run through the command layer, then reloads a
//! checkpoint, prints its header and evaluates it.
//!
//! ```text
//! cargo run --release --example checkpoints
//! ```

use ranslice::harness::TrainMode;
use ranslice::io::{cmd_evaluate, cmd_train, Checkpoint, EvaluateArgs, TrainArgs, CHECKPOINT_DIR};

const CONFIG: &str = r#"
seeds = [0]
scenario = "noniid-unequal"

[ddpg]
hidden = [16, 12]
batch_size = 32

[federation]
rounds = 2
episodes_per_round = 5
steps_per_episode = 20
heldout_states = 8
"#;

fn main() -> ranslice::Result<()> {
    let dir = std::env::temp_dir().join("ranslice-checkpoints-example");
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("run.toml");
    std::fs::write(&config, CONFIG)?;

    let manifest = cmd_train(&TrainArgs {
        config: Some(config.clone()),
        mode: Some(TrainMode::Fdrl),
        out: Some(dir.join("run")),
        ..TrainArgs::default()
    })?;
    println!("config digest {}", manifest.config_digest);
    for f in &manifest.files {
        println!("  wrote {f}");
    }

    let path = dir.join("run").join(CHECKPOINT_DIR).join("fdrl-seed0-round2-global.ckpt");
    let ckpt = Checkpoint::load(&path)?;
    print!("{}", ckpt.describe());
    let copy = dir.join("copy.ckpt");
    ckpt.save(&copy)?;
    println!("byte-identical after reload: {}", std::fs::read(&path)? == std::fs::read(&copy)?);

    let report = cmd_evaluate(&EvaluateArgs {
        checkpoints: vec![path],
        config: Some(config),
        scenario: Some("shift-2".into()),
        n_obs: 500,
        seed: Some(0),
        out: Some(dir.join("eval")),
    })?;
    print!("{}", std::fs::read_to_string(report)?);
    Ok(())
}
