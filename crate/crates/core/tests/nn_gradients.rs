use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ranslice::nn::{adam_step, mlp_spec, Activation, AdamState, LayerSpec, NetParams};

/// Loss `sum(out * weights)` so every output gets a distinct upstream gradient.
fn loss(net: &NetParams, x: &Array2<f64>, w: &Array2<f64>) -> f64 {
    (net.forward(x.view()).unwrap().into_output() * w).sum()
}

fn max_relative_error(spec: &[LayerSpec], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Random biases keep pre-activations off the ReLU kink at exactly zero.
    let init = NetParams::init(spec, &mut rng).unwrap().flatten();
    let perturbed: Vec<f64> = init.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
    let net = NetParams::unflatten(spec, &perturbed).unwrap();
    let n = 4;
    let x = Array2::from_shape_simple_fn((n, spec[0].in_dim), || rng.random_range(-1.0..1.0));
    let out = spec.last().unwrap().out_dim;
    let w = Array2::from_shape_simple_fn((n, out), || rng.random_range(-1.0..1.0));

    let cache = net.forward(x.view()).unwrap();
    let (grads, _) = net.backward(&cache, w.view()).unwrap();
    let analytic = grads.flatten();

    let base = net.flatten();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..base.len() {
        let mut p = base.clone();
        p[k] += h;
        let plus = loss(&NetParams::unflatten(spec, &p).unwrap(), &x, &w);
        p[k] -= 2.0 * h;
        let minus = loss(&NetParams::unflatten(spec, &p).unwrap(), &x, &w);
        let fd = (plus - minus) / (2.0 * h);
        let scale = fd.abs().max(analytic[k].abs());
        // Entries where both sides vanish carry no information.
        if scale > 1e-6 {
            worst = worst.max((fd - analytic[k]).abs() / scale);
        }
    }
    worst
}

#[test]
fn backprop_matches_central_differences_on_small_net() {
    let spec = mlp_spec(4, &[8], 3, Activation::Sigmoid);
    let err = max_relative_error(&spec, 1);
    assert!(err < 1e-4, "max relative error {err}");
}

#[test]
fn backprop_matches_central_differences_on_reduced_actor_shape() {
    let spec = mlp_spec(10, &[16, 12], 5, Activation::Sigmoid);
    let err = max_relative_error(&spec, 2);
    assert!(err < 1e-4, "max relative error {err}");
}

#[test]
fn backprop_matches_on_random_architectures() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let heads = [Activation::Sigmoid, Activation::Identity, Activation::Relu];
    for i in 0..20 {
        let depth = rng.random_range(1..=3);
        let hidden: Vec<usize> = (0..depth).map(|_| rng.random_range(2..=10)).collect();
        let spec = mlp_spec(rng.random_range(1..=8), &hidden, rng.random_range(1..=4), heads[i % 3]);
        let err = max_relative_error(&spec, 100 + i as u64);
        assert!(err < 1e-4, "net {i} ({spec:?}): max relative error {err}");
    }
}

#[test]
fn input_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = mlp_spec(5, &[7, 6], 2, Activation::Identity);
    let net = NetParams::init(&spec, &mut rng).unwrap();
    let x = Array2::from_shape_simple_fn((3, 5), || rng.random_range(-1.0..1.0));
    let w = Array2::from_shape_simple_fn((3, 2), || rng.random_range(-1.0..1.0));
    let cache = net.forward(x.view()).unwrap();
    let (_, dx) = net.backward(&cache, w.view()).unwrap();
    let h = 1e-6;
    for i in 0..3 {
        for j in 0..5 {
            let mut xp = x.clone();
            xp[[i, j]] += h;
            let mut xm = x.clone();
            xm[[i, j]] -= h;
            let fd = (loss(&net, &xp, &w) - loss(&net, &xm, &w)) / (2.0 * h);
            assert!((fd - dx[[i, j]]).abs() <= 1e-6 * fd.abs().max(1.0), "{fd} vs {}", dx[[i, j]]);
        }
    }
}

#[test]
fn adam_fits_a_linear_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = mlp_spec(3, &[], 1, Activation::Identity);
    let mut net = NetParams::init(&spec, &mut rng).unwrap();
    let mut state = AdamState::new(&net);
    let x = Array2::from_shape_simple_fn((64, 3), || rng.random_range(-1.0..1.0));
    let y = x.column(0).to_owned() * 2.0 - x.column(1).to_owned() + 0.5;
    let mse = |net: &NetParams| {
        let out = net.forward(x.view()).unwrap().into_output();
        (&out.column(0) - &y).mapv(|e| e * e).mean().unwrap()
    };
    let start = mse(&net);
    for _ in 0..2000 {
        let cache = net.forward(x.view()).unwrap();
        let err = (&cache.output().column(0) - &y).mapv(|e| 2.0 * e / 64.0);
        let g = err.insert_axis(ndarray::Axis(1));
        let (grads, _) = net.backward(&cache, g.view()).unwrap();
        adam_step(&mut net, &grads, &mut state, 1e-2).unwrap();
    }
    let end = mse(&net);
    assert!(end < 1e-6 && end < start, "{start} -> {end}");
}
