use ranslice::ddpg::{AgentConfig, AgentParams, Policy};
use ranslice::env::{EnvConfig, EnvState};
use ranslice::harness::{
    evaluate, evaluation_states, grid_resolution, oracle_for_state, run_fdrl, run_local_baseline, scenario_by_name,
    scenario_catalog, NamedPolicy, TrainParams,
};
use ranslice::seed::{rng_for, Stream};

fn untrained(seed: u64, env: &EnvConfig) -> Policy {
    let cfg = AgentConfig {
        f_max: env.f_max,
        hidden: vec![12, 8],
        ..AgentConfig::default()
    };
    Policy {
        actor: AgentParams::init(&cfg, env.c_max, &mut rng_for(seed, Stream::Init)).unwrap().actor,
        f_max: env.f_max,
    }
}

#[test]
fn every_model_sees_the_same_states() {
    let env = EnvConfig::default();
    let spec = scenario_by_name("shift-2", &env).unwrap();
    let a = evaluation_states(&spec, &env, 30, 9).unwrap();
    let b = evaluation_states(&spec, &env, 30, 9).unwrap();
    assert_eq!(a, b);

    // The same policy under two names, placed around a different one.
    let p = untrained(1, &env);
    let models = [
        NamedPolicy { id: "x".into(), policy: p.clone() },
        NamedPolicy { id: "other".into(), policy: untrained(2, &env) },
        NamedPolicy { id: "y".into(), policy: p },
    ];
    let rep = evaluate(&models, &spec, &env, 300, 4).unwrap();
    let cells = |id: &str| rep.cells.iter().filter(|c| c.model_id == id).map(|c| (c.mvno_id, c.user_type, c.violations)).collect::<Vec<_>>();
    assert_eq!(cells("x"), cells("y"));
}

#[test]
fn oracle_bounds_an_untrained_policy_on_every_scenario() {
    let env = EnvConfig::default();
    let policy = untrained(0, &env);
    let mut rng = rng_for(11, Stream::Oracle);
    for spec in scenario_catalog(&env) {
        for k in 0..12 {
            let state = EnvState::sample(&spec.mvnos[k % spec.mvnos.len()], &env, &mut rng).unwrap();
            let best = oracle_for_state(&state, &env, 0.05).unwrap();
            let greedy = state.score(&policy.act(&state.observation(&env)), &env).unwrap().reward;
            assert!(
                best.reward >= greedy - grid_resolution(&state, &env, 0.05),
                "{} state {k}: oracle {} < policy {greedy}",
                spec.name,
                best.reward
            );
        }
    }
}

#[test]
fn baseline_and_federated_runs_take_the_same_steps() {
    let mut p = TrainParams::desk();
    p.rounds = 2;
    p.episodes_per_round = 3;
    p.steps_per_episode = 8;
    p.heldout_states = 4;
    p.agent.hidden = vec![8, 6];
    p.agent.batch_size = 8;
    let spec = scenario_by_name("noniid-unequal", &p.env).unwrap();
    let f = run_fdrl(&spec, &p, 3).unwrap();
    let l = run_local_baseline(&spec, &p, 3).unwrap();

    let local_rows = |o: &ranslice::harness::TrainOutcome| o.report.rows.iter().filter(|r| r.mvno_id.is_some()).count();
    assert_eq!(local_rows(&f), local_rows(&l));
    assert_eq!(local_rows(&f), 2 * 3 * 3);
    assert_eq!(f.round_locals.len(), l.round_locals.len());
    assert_eq!(f.round_globals.len(), 2);
    assert!(l.round_globals.is_empty() && l.global.is_none());
    for m in &spec.mvnos {
        // Before any aggregation both runs are the same computation.
        assert_eq!(f.report.mvno_round_mean(m.mvno_id, 1), l.report.mvno_round_mean(m.mvno_id, 1));
    }
}
