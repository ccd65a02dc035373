//! Exhaustive grid search over per-user fractions, used as an upper bound
//! on any policy's step reward.

use crate::env::{per_user_reward, physics, score_allocation, EnvConfig, EnvState, User};
use crate::error::{Error, Result};

/// Search nodes allowed before giving up.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Best fractions, padded to `c_max`.
    pub fractions: Vec<f64>,
    pub reward: f64,
    pub nodes: u64,
}

/// Grid points `0, step, 2 step, ...` not exceeding `f_max`.
pub fn fraction_grid(f_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::config("grid_step", "must be a positive number"));
    }
    let k = (f_max / step + 1e-9).floor() as usize;
    Ok((0..=k).map(|i| (i as f64 * step).min(f_max)).collect())
}

struct Candidate {
    f: f64,
    reward: f64,
}

fn user_reward(user: &User, gain: f64, f: f64, b_i: f64, config: &EnvConfig) -> (f64, bool) {
    let rate = physics::user_rate(user.tx_power, gain, f, b_i, config.noise_density);
    let delay = physics::tx_delay(user.packet_bits, rate);
    let ok = match user.kind {
        crate::env::UserType::Embb => rate >= config.delta_min,
        crate::env::UserType::Urllc => delay <= config.d_max,
    };
    (per_user_reward(user, rate, delay, config), ok)
}

/// Best valid allocation on the fraction grid.
///
/// Grid points that break a user's SLA can only produce an invalid step, so
/// each user's candidates are its SLA-satisfying points. Depth-first search
/// in user order with a sum-budget cut and a reward bound visits every
/// combination that could still win. If no valid allocation exists the
/// result is the all-zero action with the invalid-step reward.
pub fn oracle_allocate(
    users: &[User],
    gains: &[f64],
    b_i: f64,
    config: &EnvConfig,
    grid_step: f64,
) -> Result<OracleResult> {
    oracle_allocate_with_budget(users, gains, b_i, config, grid_step, DEFAULT_NODE_BUDGET)
}

pub fn oracle_allocate_with_budget(
    users: &[User],
    gains: &[f64],
    b_i: f64,
    config: &EnvConfig,
    grid_step: f64,
    budget: u64,
) -> Result<OracleResult> {
    if users.len() > config.c_max || gains.len() != users.len() {
        return Err(Error::contract("oracle needs one gain per user and at most c_max users"));
    }
    let grid = fraction_grid(config.f_max, grid_step)?;
    let n = users.len();

    // Per user: SLA-satisfying points, largest fraction (= largest reward) first.
    let mut cands: Vec<Vec<Candidate>> = Vec::with_capacity(n);
    for (u, &g) in users.iter().zip(gains) {
        let mut c: Vec<Candidate> = grid
            .iter()
            .filter_map(|&f| {
                let (reward, ok) = user_reward(u, g, f, b_i, config);
                ok.then_some(Candidate { f, reward })
            })
            .collect();
        c.reverse();
        cands.push(c);
    }

    let mut fractions = vec![0.0; config.c_max];
    if cands.iter().any(Vec::is_empty) {
        let out = score_allocation(&fractions, users, gains, b_i, config);
        return Ok(OracleResult {
            fractions,
            reward: out.reward,
            nodes: 0,
        });
    }

    // Suffix bounds: smallest feasible fraction and largest reward still to come.
    let mut min_rest = vec![0.0; n + 1];
    let mut max_rest = vec![0.0; n + 1];
    for j in (0..n).rev() {
        min_rest[j] = min_rest[j + 1] + cands[j].last().map_or(0.0, |c| c.f);
        max_rest[j] = max_rest[j + 1] + cands[j].first().map_or(0.0, |c| c.reward);
    }

    struct Search<'a> {
        cands: &'a [Vec<Candidate>],
        min_rest: &'a [f64],
        max_rest: &'a [f64],
        current: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
        nodes: u64,
        budget: u64,
    }

    impl Search<'_> {
        fn visit(&mut self, j: usize, sum: f64, reward: f64) -> Result<()> {
            let n = self.cands.len();
            if j == n {
                if sum <= 1.0 && self.best.as_ref().map_or(true, |(b, _)| reward > *b) {
                    self.best = Some((reward, self.current.clone()));
                }
                return Ok(());
            }
            for (k, c) in self.cands[j].iter().enumerate() {
                let s = sum + c.f;
                // Too wide even if everyone after takes their minimum.
                if s + self.min_rest[j + 1] > 1.0 + 1e-12 {
                    continue;
                }
                // Candidates are in decreasing reward order, so nothing later wins either.
                if let Some((b, _)) = &self.best {
                    if reward + c.reward + self.max_rest[j + 1] <= *b {
                        break;
                    }
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(Error::OracleBudget { budget: self.budget });
                }
                self.current[j] = k;
                self.visit(j + 1, s, reward + c.reward)?;
            }
            Ok(())
        }
    }

    let mut search = Search {
        cands: &cands,
        min_rest: &min_rest,
        max_rest: &max_rest,
        current: vec![0; n],
        best: None,
        nodes: 0,
        budget,
    };
    search.visit(0, 0.0, 0.0)?;
    let nodes = search.nodes;
    match search.best {
        Some((_, picks)) => {
            for (j, k) in picks.into_iter().enumerate() {
                fractions[j] = cands[j][k].f;
            }
        }
        None => fractions.fill(0.0),
    }
    let out = score_allocation(&fractions, users, gains, b_i, config);
    Ok(OracleResult {
        fractions,
        reward: out.reward,
        nodes,
    })
}

/// [`oracle_allocate`] on a sampled state.
pub fn oracle_for_state(state: &EnvState, config: &EnvConfig, grid_step: f64) -> Result<OracleResult> {
    oracle_allocate(&state.users, &state.gains, state.leased_bandwidth, config, grid_step)
}

/// Reward a one-grid-step allocation earns, summed over live users.
///
/// Per-user reward is concave and increasing in the fraction, so this bounds
/// what snapping any allocation down onto the grid can cost.
pub fn grid_resolution(state: &EnvState, config: &EnvConfig, grid_step: f64) -> f64 {
    let f = grid_step.min(config.f_max);
    state
        .users
        .iter()
        .zip(&state.gains)
        .map(|(u, &g)| user_reward(u, g, f, state.leased_bandwidth, config).0)
        .sum()
}
