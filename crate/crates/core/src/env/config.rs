use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radio and SLA parameters shared by every MVNO environment.
///
/// Every physical constant lives here; nothing downstream hard-codes a value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Total base-station bandwidth `B` in Hz.
    pub total_bandwidth: f64,
    /// Noise power spectral density in W/Hz.
    pub noise_density: f64,
    /// Upper bound on any single user's bandwidth fraction.
    pub f_max: f64,
    /// Maximum users per MVNO; fixes observation and action widths.
    pub c_max: usize,
    /// Side of the square coverage area, in meters.
    pub cell_side: f64,
    pub path_loss_exponent: f64,
    /// Rayleigh fading on/off. With fading off the gain is pure path loss.
    pub fading: bool,
    /// URLLC delay bound in seconds.
    pub d_max: f64,
    /// eMBB minimum rate in bit/s.
    pub delta_min: f64,
    pub w_e: f64,
    pub w_u: f64,
    pub bs_position: [f64; 2],
    /// Uplink transmit power for every user, in watts.
    pub tx_power: f64,
    pub packet_bits_embb: f64,
    pub packet_bits_urllc: f64,
    /// Channel-gain range in dB mapped onto the [0, 1] observation feature.
    pub gain_db_range: [f64; 2],
    /// A fraction above this on a padded slot costs the padding punishment.
    pub pad_epsilon: f64,
    /// Users (types and positions) are redrawn every this many episodes.
    pub position_reset_episodes: usize,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            total_bandwidth: 3e6,
            noise_density: 3.98e-21,
            f_max: 0.3,
            c_max: 5,
            cell_side: 500.0,
            path_loss_exponent: 3.0,
            fading: true,
            d_max: 2e-3,
            delta_min: 1e6,
            w_e: 1.0,
            w_u: 2.0,
            bs_position: [250.0, 250.0],
            tx_power: 0.1,
            packet_bits_embb: 100_000.0,
            packet_bits_urllc: 160.0,
            gain_db_range: [-140.0, -60.0],
            pad_epsilon: 1e-3,
            position_reset_episodes: 25,
        }
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be a positive finite number, got {v}")))
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<()> {
        positive("env.total_bandwidth", self.total_bandwidth)?;
        positive("env.noise_density", self.noise_density)?;
        positive("env.cell_side", self.cell_side)?;
        positive("env.path_loss_exponent", self.path_loss_exponent)?;
        positive("env.d_max", self.d_max)?;
        positive("env.delta_min", self.delta_min)?;
        positive("env.tx_power", self.tx_power)?;
        positive("env.packet_bits_embb", self.packet_bits_embb)?;
        positive("env.packet_bits_urllc", self.packet_bits_urllc)?;
        positive("env.pad_epsilon", self.pad_epsilon)?;
        if !(self.f_max > 0.0 && self.f_max <= 1.0) {
            return Err(Error::config("env.f_max", format!("must lie in (0, 1], got {}", self.f_max)));
        }
        if self.c_max < 1 {
            return Err(Error::config("env.c_max", "must be at least 1"));
        }
        positive("env.w_e", self.w_e)?;
        if !(self.w_u >= self.w_e) {
            return Err(Error::config("env.w_u", "must be >= w_e"));
        }
        let [lo, hi] = self.gain_db_range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config("env.gain_db_range", "needs finite low < high"));
        }
        let [x, y] = self.bs_position;
        if !(0.0..=self.cell_side).contains(&x) || !(0.0..=self.cell_side).contains(&y) {
            return Err(Error::config("env.bs_position", "must lie inside the coverage square"));
        }
        if self.position_reset_episodes == 0 {
            return Err(Error::config("env.position_reset_episodes", "must be at least 1"));
        }
        Ok(())
    }

    pub fn packet_bits(&self, kind: UserType) -> f64 {
        match kind {
            UserType::Embb => self.packet_bits_embb,
            UserType::Urllc => self.packet_bits_urllc,
        }
    }

    pub fn priority(&self, kind: UserType) -> f64 {
        match kind {
            UserType::Embb => self.w_e,
            UserType::Urllc => self.w_u,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UserType {
    #[serde(rename = "embb")]
    Embb,
    #[serde(rename = "urllc")]
    Urllc,
}

impl UserType {
    pub fn as_str(self) -> &'static str {
        match self {
            UserType::Embb => "embb",
            UserType::Urllc => "urllc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub id: usize,
    pub kind: UserType,
    pub position: [f64; 2],
    pub tx_power: f64,
    pub packet_bits: f64,
}

/// One MVNO's slice of the scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MvnoScenario {
    pub mvno_id: usize,
    pub n_users: usize,
    pub urllc_prob: f64,
    /// Leased bandwidth `B_i` in Hz.
    pub leased_bandwidth: f64,
}

impl MvnoScenario {
    pub fn validate(&self, config: &EnvConfig) -> Result<()> {
        let key = |f: &str| format!("scenario.mvno[{}].{f}", self.mvno_id);
        if self.n_users == 0 {
            return Err(Error::config(key("n_users"), "must be at least 1"));
        }
        if self.n_users > config.c_max {
            return Err(Error::config(
                key("n_users"),
                format!("{} exceeds c_max = {}", self.n_users, config.c_max),
            ));
        }
        if !(0.0..=1.0).contains(&self.urllc_prob) {
            return Err(Error::config(key("urllc_prob"), "must lie in [0, 1]"));
        }
        positive(&key("leased_bandwidth"), self.leased_bandwidth)
    }
}
