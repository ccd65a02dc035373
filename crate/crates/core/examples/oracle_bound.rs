//! Exhaustive grid oracle against an untrained policy on sampled states.
//!
//! ```text
//! cargo run --release --example oracle_bound -- [n_states] [grid_step]
//! ```

use ranslice::ddpg::{AgentConfig, AgentParams, Policy};
use ranslice::env::{EnvConfig, EnvState};
use ranslice::harness::{grid_resolution, oracle_for_state, scenario_by_name};
use ranslice::seed::{rng_for, Stream};

fn main() -> ranslice::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let step: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.01);

    let env = EnvConfig::default();
    let spec = scenario_by_name("noniid-equal", &env)?;
    let agent = AgentConfig {
        f_max: env.f_max,
        hidden: vec![64, 48],
        ..AgentConfig::default()
    };
    let policy = Policy {
        actor: AgentParams::init(&agent, env.c_max, &mut rng_for(0, Stream::Init))?.actor,
        f_max: env.f_max,
    };

    let mut rng = rng_for(0, Stream::Oracle);
    let (mut gap, mut nodes) = (0.0, 0);
    for k in 0..n {
        let state = EnvState::sample(&spec.mvnos[k % spec.mvnos.len()], &env, &mut rng)?;
        let best = oracle_for_state(&state, &env, step)?;
        let greedy = state.score(&policy.act(&state.observation(&env)), &env)?.reward;
        let slack = grid_resolution(&state, &env, step);
        assert!(best.reward >= greedy - slack);
        gap += best.reward - greedy;
        nodes += best.nodes;
        if k < 5 {
            let f: Vec<String> = best.fractions.iter().map(|f| format!("{f:.2}")).collect();
            println!("state {k}: oracle {:>8.2} [{}]  policy {greedy:>8.2}", best.reward, f.join(" "));
        }
    }
    println!("mean oracle gap {:.2} over {n} states, {} search nodes", gap / n as f64, nodes);
    Ok(())
}
