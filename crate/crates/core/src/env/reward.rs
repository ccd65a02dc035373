//! SLA validity and the MDP reward.

use super::config::{EnvConfig, User, UserType};
use super::physics::{tx_delay, user_rate};

/// Reward of an invalid step.
pub const INVALID_REWARD: f64 = -0.1;
/// Subtracted from valid steps that hand bandwidth to an absent user.
pub const PADDING_PENALTY: f64 = 0.1;

/// Which constraints an allocation broke, by user index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidityReport {
    /// Live users whose fraction lies outside `[0, f_max]`.
    pub out_of_range: Vec<usize>,
    pub fraction_sum: f64,
    pub sum_exceeded: bool,
    pub embb_rate_violations: Vec<usize>,
    pub urllc_delay_violations: Vec<usize>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.out_of_range.is_empty()
            && !self.sum_exceeded
            && self.embb_rate_violations.is_empty()
            && self.urllc_delay_violations.is_empty()
    }
}

/// Checks the box, sum and per-type SLA constraints over the live users.
///
/// `fractions`, `rates` and `delays` are indexed like `users`; extra entries
/// (padded slots) are ignored here.
pub fn validate_action(
    fractions: &[f64],
    users: &[User],
    rates: &[f64],
    delays: &[f64],
    config: &EnvConfig,
) -> ValidityReport {
    let mut report = ValidityReport::default();
    let mut sum = 0.0;
    for (j, user) in users.iter().enumerate() {
        let f = fractions[j];
        if !(0.0..=config.f_max).contains(&f) {
            report.out_of_range.push(j);
        }
        sum += f;
        match user.kind {
            UserType::Embb => {
                if !(rates[j] >= config.delta_min) {
                    report.embb_rate_violations.push(j);
                }
            }
            UserType::Urllc => {
                if !(delays[j] <= config.d_max) {
                    report.urllc_delay_violations.push(j);
                }
            }
        }
    }
    report.fraction_sum = sum;
    report.sum_exceeded = !(sum <= 1.0);
    report
}

/// Satisfaction of one user, normalized by its SLA anchor.
pub fn per_user_reward(user: &User, rate: f64, delay: f64, config: &EnvConfig) -> f64 {
    match user.kind {
        UserType::Embb => config.w_e * (rate / config.delta_min),
        UserType::Urllc => {
            if delay.is_finite() {
                config.w_u * (config.d_max / delay)
            } else {
                0.0
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Violations {
    pub embb_rate: usize,
    pub urllc_delay: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.embb_rate + self.urllc_delay
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub per_user_rate: Vec<f64>,
    /// `+inf` for users that received nothing.
    pub per_user_delay: Vec<f64>,
    pub valid: bool,
    pub violations: Violations,
    pub padding_penalized: bool,
}

/// Scores an already clipped allocation of length `c_max` for the live users.
///
/// Invalid allocations earn exactly [`INVALID_REWARD`]; the padding penalty
/// only applies to otherwise valid ones.
pub fn score_allocation(
    fractions: &[f64],
    users: &[User],
    gains: &[f64],
    b_i: f64,
    config: &EnvConfig,
) -> StepOutcome {
    let n = users.len();
    let mut rates = Vec::with_capacity(n);
    let mut delays = Vec::with_capacity(n);
    for (j, user) in users.iter().enumerate() {
        let rate = user_rate(user.tx_power, gains[j], fractions[j], b_i, config.noise_density);
        rates.push(rate);
        delays.push(tx_delay(user.packet_bits, rate));
    }
    let report = validate_action(fractions, users, &rates, &delays, config);
    let violations = Violations {
        embb_rate: report.embb_rate_violations.len(),
        urllc_delay: report.urllc_delay_violations.len(),
    };
    let valid = report.is_valid();
    let mut padding_penalized = false;
    let reward = if valid {
        let mut r: f64 = users
            .iter()
            .enumerate()
            .map(|(j, u)| per_user_reward(u, rates[j], delays[j], config))
            .sum();
        if fractions[n..].iter().any(|&f| f > config.pad_epsilon) {
            padding_penalized = true;
            r -= PADDING_PENALTY;
        }
        r
    } else {
        INVALID_REWARD
    };
    StepOutcome {
        reward,
        per_user_rate: rates,
        per_user_delay: delays,
        valid,
        violations,
        padding_penalized,
    }
}
