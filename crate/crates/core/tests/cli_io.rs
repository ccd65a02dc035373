use std::fs;
use std::path::{Path, PathBuf};

use ranslice::harness::TrainMode;
use ranslice::io::{
    cmd_evaluate, cmd_inspect, cmd_oracle, cmd_train, load_config, Checkpoint, EvaluateArgs, OracleArgs, TrainArgs,
    CHECKPOINT_DIR, EVAL_REPORT, MANIFEST, ORACLE_REPORT, TRAIN_REPORT,
};

const TINY: &str = r#"
seeds = [0, 1]
scenario = "noniid-unequal"

[ddpg]
hidden = [8, 6]
batch_size = 16
buffer_capacity = 1000

[federation]
rounds = 2
episodes_per_round = 3
steps_per_episode = 10
heldout_states = 4
"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    path
}

fn train(dir: &Path, mode: TrainMode, out: &str) -> PathBuf {
    let out = dir.join(out);
    cmd_train(&TrainArgs {
        config: Some(write_config(dir, TINY)),
        mode: Some(mode),
        out: Some(out.clone()),
        ..TrainArgs::default()
    })
    .unwrap();
    out
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_string).collect()
}

fn checkpoints(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir.join(CHECKPOINT_DIR))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    v.sort();
    v
}

#[test]
fn fdrl_train_writes_expected_rows_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = train(tmp.path(), TrainMode::Fdrl, "fdrl");
    let rows = lines(&out.join(TRAIN_REPORT));
    assert_eq!(rows[0], "round,episode,mvno_id,mean_reward,noise_scale,seed");
    // 2 seeds x 2 rounds x 3 episodes x (3 MVNOs + global)
    assert_eq!(rows.len() - 1, 2 * 2 * 3 * 4);
    assert_eq!(rows.iter().filter(|r| r.contains(",global,")).count(), 2 * 2 * 3);
    assert!(fs::read(out.join(TRAIN_REPORT)).unwrap().ends_with(b"\n"));
    assert_eq!(checkpoints(&out).len(), 2 * 2);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join(MANIFEST)).unwrap()).unwrap();
    assert_eq!(manifest["mode"], "fdrl");
    assert_eq!(manifest["seeds"], serde_json::json!([0, 1]));
}

#[test]
fn local_train_has_no_global_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = train(tmp.path(), TrainMode::Local, "local");
    let rows = lines(&out.join(TRAIN_REPORT));
    assert_eq!(rows.len() - 1, 2 * 2 * 3 * 3);
    assert!(!rows.iter().any(|r| r.contains("global")));
    // One checkpoint per seed, round and MVNO.
    assert_eq!(checkpoints(&out).len(), 2 * 2 * 3);
}

#[test]
fn repeated_commands_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let a = train(tmp.path(), TrainMode::Fdrl, "a");
    let b = train(tmp.path(), TrainMode::Fdrl, "b");
    for name in [TRAIN_REPORT, MANIFEST] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    for (x, y) in checkpoints(&a).iter().zip(checkpoints(&b)) {
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }

    let eval = |out: &str| {
        cmd_evaluate(&EvaluateArgs {
            checkpoints: vec![checkpoints(&a)[0].clone(), checkpoints(&a)[0].clone()],
            config: None,
            scenario: Some("shift-1".into()),
            n_obs: 50,
            seed: Some(3),
            out: Some(tmp.path().join(out)),
        })
        .unwrap()
    };
    let (e1, e2) = (eval("e1"), eval("e2"));
    assert_eq!(fs::read(&e1).unwrap(), fs::read(&e2).unwrap());
}

#[test]
fn checkpoint_save_load_save_is_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out = train(tmp.path(), TrainMode::Local, "ck");
    let path = &checkpoints(&out)[0];
    let ck = Checkpoint::load(path).unwrap();
    let again = tmp.path().join("again.ckpt");
    ck.save(&again).unwrap();
    assert_eq!(fs::read(path).unwrap(), fs::read(&again).unwrap());
    let text = cmd_inspect(path).unwrap();
    assert!(text.contains("10:8:relu 8:6:relu 6:5:sigmoid"), "{text}");
}

#[test]
fn evaluation_covers_every_cell_within_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let out = train(tmp.path(), TrainMode::Local, "ev");
    let cks: Vec<PathBuf> = checkpoints(&out).into_iter().filter(|p| p.to_string_lossy().contains("seed0-round2")).collect();
    assert_eq!(cks.len(), 3);
    let n_obs = 40;
    let path = cmd_evaluate(&EvaluateArgs {
        checkpoints: cks,
        config: None,
        scenario: Some("noniid-unequal".into()),
        n_obs,
        seed: Some(0),
        out: Some(tmp.path().join("eval")),
    })
    .unwrap();
    assert_eq!(path.file_name().unwrap(), EVAL_REPORT);
    let rows = lines(&path);
    assert_eq!(rows[0], "model_id,mvno_id,user_type,violations,n_obs,seed");
    // 3 models x 3 MVNOs x 2 user types
    assert_eq!(rows.len() - 1, 18);
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        let violations: usize = f[3].parse().unwrap();
        assert!(violations <= n_obs * 5);
        assert_eq!(f[4], "40");
    }
}

#[test]
fn evaluation_rejects_missing_or_mismatched_checkpoints() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = cmd_evaluate(&EvaluateArgs {
        checkpoints: vec![tmp.path().join("nope.ckpt")],
        config: None,
        scenario: None,
        n_obs: 10,
        seed: None,
        out: Some(tmp.path().to_path_buf()),
    });
    assert!(missing.is_err());

    let out = train(tmp.path(), TrainMode::Fdrl, "mm");
    let other = write_config(tmp.path(), "[env]\nc_max = 6\n");
    let mismatch = cmd_evaluate(&EvaluateArgs {
        checkpoints: vec![checkpoints(&out)[0].clone()],
        config: Some(other),
        scenario: None,
        n_obs: 10,
        seed: None,
        out: Some(tmp.path().join("mm-eval")),
    });
    assert!(mismatch.is_err());
}

#[test]
fn oracle_report_rows_and_two_point_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let inline = r#"
[scenario]
name = "single"
[[scenario.mvnos]]
mvno_id = 1
n_users = 1
urllc_prob = 0.0
leased_bandwidth = 1e6
"#;
    let cfg = write_config(tmp.path(), inline);
    let run = |out: &str| {
        cmd_oracle(&OracleArgs {
            config: Some(cfg.clone()),
            scenario: None,
            grid_step: 0.3,
            n_states: 12,
            seed: Some(4),
            out: Some(tmp.path().join(out)),
            timing: false,
        })
        .unwrap()
    };
    let a = run("o1");
    assert_eq!(a.file_name().unwrap(), ORACLE_REPORT);
    let rows = lines(&a);
    assert_eq!(rows[0], "state_id,best_reward,best_fractions,wall_clock");
    assert_eq!(rows.len() - 1, 12);
    for r in &rows[1..] {
        let f: Vec<&str> = r.split(',').collect();
        let first: f64 = f[2].split(';').next().unwrap().parse().unwrap();
        assert!(first == 0.0 || first == 0.3, "{r}");
        assert_eq!(f[3], "");
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(run("o2")).unwrap());
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let full = load_config(&dir.join("full.toml")).unwrap();
    assert_eq!(full.federation.rounds, 5);
    assert_eq!(full.ddpg.hidden, vec![400, 300]);
    let desk = load_config(&dir.join("desk.toml")).unwrap();
    assert_eq!(desk.federation.rounds, 3);
    assert_eq!(desk.federation.episodes_per_round, 100);
}
