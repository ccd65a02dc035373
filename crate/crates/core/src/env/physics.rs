//! Uplink link physics: path-loss/fading channel, SNR, Shannon rate, delay.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::config::{EnvConfig, User};
use crate::error::{Error, Result};

/// Distances below this are clamped.
pub const MIN_DISTANCE_M: f64 = 1.0;

pub fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `d^-exponent * fading` with the distance clamped to 1 m.
pub fn path_gain(distance_m: f64, exponent: f64, fading: f64) -> f64 {
    distance_m.max(MIN_DISTANCE_M).powf(-exponent) * fading
}

/// Draws a channel gain for `user`: log-distance path loss times a unit-mean
/// exponential fading power (Rayleigh amplitude).
pub fn channel_gain<R: Rng + ?Sized>(user: &User, config: &EnvConfig, rng: &mut R) -> f64 {
    let h = if config.fading {
        let h: f64 = Exp1.sample(rng);
        // Exp1 can return exactly 0; keep the gain strictly positive.
        h.max(f64::MIN_POSITIVE)
    } else {
        1.0
    };
    path_gain(
        distance(user.position, config.bs_position),
        config.path_loss_exponent,
        h,
    )
}

/// Signal-to-noise ratio `p g / (f b sigma^2)`. Rejects `f <= 0`.
pub fn snr(p: f64, g: f64, f: f64, b_i: f64, noise_density: f64) -> Result<f64> {
    if !(f > 0.0) || !(b_i > 0.0) {
        return Err(Error::contract(format!(
            "snr needs f > 0 and b_i > 0 (f = {f}, b_i = {b_i})"
        )));
    }
    Ok((p * g) / (f * b_i * noise_density))
}

/// Shannon rate `f b log2(1 + rho)`; zero for a zero allocation.
pub fn data_rate(f: f64, b_i: f64, rho: f64) -> f64 {
    if f <= 0.0 {
        return 0.0;
    }
    f * b_i * (1.0 + rho).log2()
}

/// Packet upload time; `+inf` when nothing can be sent.
pub fn tx_delay(packet_bits: f64, rate: f64) -> f64 {
    if rate > 0.0 {
        packet_bits / rate
    } else {
        f64::INFINITY
    }
}

/// Rate for one user given its gain and fraction, honoring the zero convention.
pub fn user_rate(p: f64, g: f64, f: f64, b_i: f64, noise_density: f64) -> f64 {
    match snr(p, g, f, b_i, noise_density) {
        Ok(rho) => data_rate(f, b_i, rho),
        Err(_) => 0.0,
    }
}
