//! Plain DDPG on one eMBB user with a fixed channel.
//!
//! The best action is the largest fraction the box allows, so the greedy
//! allocation should climb towards `f_max` as training proceeds.
//!
//! ```text
//! cargo run --release --example single_agent -- [seed]
//! ```

use ranslice::ddpg::{Agent, AgentConfig, AgentParams, Transition};
use ranslice::env::{encode_observation, score_allocation, EnvConfig, User, UserType};
use ranslice::seed::{rng_for, Stream};

fn main() -> ranslice::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let env = EnvConfig {
        c_max: 1,
        fading: false,
        ..EnvConfig::default()
    };
    let agent_cfg = AgentConfig {
        f_max: env.f_max,
        hidden: vec![64, 48],
        ..AgentConfig::default()
    };
    let user = User {
        id: 0,
        kind: UserType::Embb,
        position: [150.0, 250.0],
        tx_power: env.tx_power,
        packet_bits: env.packet_bits(UserType::Embb),
    };
    // 100 m from the base station.
    let gains = [1e-6];
    let b_i = 1e6;
    let obs = encode_observation(std::slice::from_ref(&user), &gains, &env)?;

    let params = AgentParams::init(&agent_cfg, env.c_max, &mut rng_for(seed, Stream::Init))?;
    let mut agent = Agent::new(agent_cfg, env.c_max, params, rng_for(seed, Stream::Agent(0)))?;

    for episode in 1..=200 {
        agent.ou.reset();
        let mut taken = 0.0;
        for _ in 0..50 {
            let action = agent.act(&obs, true);
            taken += action.fractions[0];
            let out = score_allocation(&action.fractions, std::slice::from_ref(&user), &gains, b_i, &env);
            agent.store(Transition {
                state: obs.clone(),
                action,
                reward: out.reward,
                next_state: obs.clone(),
            });
            agent.train_step()?;
        }
        if episode % 20 == 0 {
            let greedy = agent.act(&obs, false).fractions[0];
            println!("episode {episode:>3}  mean taken {:.4}  greedy {greedy:.4}", taken / 50.0);
        }
    }
    Ok(())
}
