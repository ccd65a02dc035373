//! Compares analytic backprop against central differences on a reduced
//! actor-shaped network.
//!
//! ```text
//! cargo run --example gradient_check
//! ```

use ndarray::Array2;
use rand::Rng;
use ranslice::nn::{mlp_spec, Activation, NetParams};
use ranslice::seed::{rng_for, Stream};

fn main() -> ranslice::Result<()> {
    let mut rng = rng_for(0, Stream::Init);
    let spec = mlp_spec(10, &[16, 12], 5, Activation::Sigmoid);
    let net = NetParams::init(&spec, &mut rng)?;
    let x = Array2::from_shape_simple_fn((8, 10), || rng.random_range(0.0..1.0));
    let upstream = Array2::from_shape_simple_fn((8, 5), || rng.random_range(-1.0..1.0));
    let loss = |n: &NetParams| -> ranslice::Result<f64> { Ok((n.forward(x.view())?.into_output() * &upstream).sum()) };

    let cache = net.forward(x.view())?;
    let (grads, _) = net.backward(&cache, upstream.view())?;
    let analytic = grads.flatten();

    let base = net.flatten();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..base.len() {
        let mut p = base.clone();
        p[k] += h;
        let plus = loss(&NetParams::unflatten(&spec, &p)?)?;
        p[k] -= 2.0 * h;
        let minus = loss(&NetParams::unflatten(&spec, &p)?)?;
        let fd = (plus - minus) / (2.0 * h);
        let scale = fd.abs().max(analytic[k].abs());
        if scale > 1e-6 {
            worst = worst.max((fd - analytic[k]).abs() / scale);
        }
    }
    println!("{} parameters, max relative error {worst:.3e}", base.len());
    Ok(())
}
