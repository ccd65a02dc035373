use super::config::{EnvConfig, User};
use crate::error::{Error, Result};

/// Zero-padded MVNO state: `c_max` gain features followed by `c_max` type codes.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    values: Vec<f64>,
    c_max: usize,
}

impl Observation {
    pub fn from_vec(values: Vec<f64>, c_max: usize) -> Result<Self> {
        if values.len() != 2 * c_max {
            return Err(Error::contract(format!(
                "observation length {} != 2 * c_max = {}",
                values.len(),
                2 * c_max
            )));
        }
        Ok(Self { values, c_max })
    }

    pub fn zeros(c_max: usize) -> Self {
        Self {
            values: vec![0.0; 2 * c_max],
            c_max,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn gains(&self) -> &[f64] {
        &self.values[..self.c_max]
    }

    pub fn types(&self) -> &[f64] {
        &self.values[self.c_max..]
    }

    pub fn c_max(&self) -> usize {
        self.c_max
    }
}

/// Per-slot bandwidth fractions, one per `c_max` slot.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationAction {
    pub fractions: Vec<f64>,
}

impl AllocationAction {
    pub fn new(fractions: Vec<f64>) -> Self {
        Self { fractions }
    }

    pub fn zeros(c_max: usize) -> Self {
        Self {
            fractions: vec![0.0; c_max],
        }
    }

    /// Clamps every entry to `[0, f_max]`; NaN becomes 0.
    pub fn clipped(&self, f_max: f64) -> Self {
        let fractions = self
            .fractions
            .iter()
            .map(|&f| if f.is_nan() { 0.0 } else { f.clamp(0.0, f_max) })
            .collect();
        Self { fractions }
    }

    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }
}

/// Maps a raw gain to `[0, 1]` through its dB value over the configured range.
pub fn gain_feature(gain: f64, config: &EnvConfig) -> f64 {
    let [lo, hi] = config.gain_db_range;
    let db = 10.0 * gain.log10();
    if db.is_nan() {
        return 0.0;
    }
    ((db - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Lays out `[g_1..g_n, 0.., t_1..t_n, 0..]` with `t` the user's priority code.
pub fn encode_observation(users: &[User], gains: &[f64], config: &EnvConfig) -> Result<Observation> {
    let c = config.c_max;
    if users.len() > c {
        return Err(Error::contract(format!("{} users exceed c_max = {c}", users.len())));
    }
    if gains.len() != users.len() {
        return Err(Error::contract("one gain per user required"));
    }
    let mut values = vec![0.0; 2 * c];
    for (j, (user, &g)) in users.iter().zip(gains).enumerate() {
        values[j] = gain_feature(g, config);
        values[c + j] = config.priority(user.kind);
    }
    Ok(Observation { values, c_max: c })
}
