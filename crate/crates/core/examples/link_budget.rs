//! Uplink physics and reward for a handful of users.
//!
//! ```text
//! cargo run --example link_budget
//! ```

use ranslice::env::{physics, score_allocation, EnvConfig, User, UserType};

fn main() {
    let cfg = EnvConfig::default();
    let b_i = 1e6;

    println!("distance  gain        f     rate (Mbit/s)  URLLC delay (ms)");
    for d in [10.0, 50.0, 150.0, 350.0] {
        let g = physics::path_gain(d, cfg.path_loss_exponent, 1.0);
        for f in [0.01, 0.1, 0.3] {
            let rate = physics::user_rate(cfg.tx_power, g, f, b_i, cfg.noise_density);
            let delay = physics::tx_delay(cfg.packet_bits_urllc, rate);
            println!("{d:>6} m  {g:.3e}  {f:<4}  {:>12.3}  {:>15.4}", rate / 1e6, delay * 1e3);
        }
    }

    let users: Vec<User> = [UserType::Embb, UserType::Urllc, UserType::Embb]
        .into_iter()
        .enumerate()
        .map(|(id, kind)| User {
            id,
            kind,
            position: [250.0 + 60.0 * id as f64, 250.0],
            tx_power: cfg.tx_power,
            packet_bits: cfg.packet_bits(kind),
        })
        .collect();
    let gains: Vec<f64> = users
        .iter()
        .map(|u| physics::path_gain(physics::distance(u.position, cfg.bs_position), cfg.path_loss_exponent, 1.0))
        .collect();

    println!("\nthree users (eMBB, URLLC, eMBB) with c_max = {}:", cfg.c_max);
    for fractions in [
        vec![0.2, 0.3, 0.2, 0.0, 0.0],
        vec![0.05, 0.3, 0.05, 0.0, 0.0],
        vec![0.3, 0.3, 0.3, 0.0, 0.0],
        vec![0.001, 0.3, 0.2, 0.0, 0.0],
        vec![0.2, 0.3, 0.2, 0.1, 0.0],
    ] {
        let out = score_allocation(&fractions, &users, &gains, b_i, &cfg);
        println!(
            "  {fractions:?}  reward {:>8.3}  valid {}  padded slot used {}",
            out.reward, out.valid, out.padding_penalized
        );
    }
}
