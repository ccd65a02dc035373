//! Federated training against the local-only baseline on the non-i.i.d.
//! scenario, then an SLA-violation campaign on shifted URLLC mixes.
//!
//! ```text
//! cargo run --release --example federated_training -- [seed] [n_obs]
//! ```

use ranslice::ddpg::Policy;
use ranslice::env::UserType;
use ranslice::harness::{evaluate, run_fdrl, run_local_baseline, scenario_by_name, NamedPolicy, TrainParams};
use ranslice::nn::NetParams;

fn main() -> ranslice::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let n_obs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);

    let params = TrainParams::desk();
    let train = scenario_by_name("noniid-equal", &params.env)?;
    let test = scenario_by_name("shift-1", &params.env)?;

    let fdrl = run_fdrl(&train, &params, seed)?;
    let local = run_local_baseline(&train, &params, seed)?;
    for round in 1..=params.rounds {
        let per_mvno: Vec<String> = train
            .mvnos
            .iter()
            .map(|m| format!("{:8.3}", fdrl.report.mvno_round_mean(m.mvno_id, round).unwrap_or(f64::NAN)))
            .collect();
        println!(
            "round {round}: global {:8.3}  local phases {}",
            fdrl.report.global_round_mean(round).unwrap_or(f64::NAN),
            per_mvno.join(" ")
        );
    }

    let spec = params.agent.actor_spec(params.env.c_max);
    let policy = |flat: &[f64]| -> ranslice::Result<Policy> {
        Ok(Policy {
            actor: NetParams::unflatten(&spec, flat)?,
            f_max: params.env.f_max,
        })
    };
    let mut models = vec![NamedPolicy {
        id: "global".into(),
        policy: policy(&fdrl.global.as_ref().expect("fdrl run aggregates").payload.actor)?,
    }];
    for (m, flat) in train.mvnos.iter().zip(&local.locals) {
        models.push(NamedPolicy {
            id: format!("local-{}", m.mvno_id),
            policy: policy(&flat.actor)?,
        });
    }

    let report = evaluate(&models, &test, &params.env, n_obs, seed)?;
    println!("violations on {} over {n_obs} observations:", test.name);
    for m in &models {
        println!(
            "  {:<8} total {:>6}  urllc {:>6}  embb {:>6}",
            m.id,
            report.model_total(&m.id),
            report.model_total_by_type(&m.id, UserType::Urllc),
            report.model_total_by_type(&m.id, UserType::Embb),
        );
    }
    Ok(())
}
