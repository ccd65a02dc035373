use ndarray::{Array1, Array2, Zip};

use super::network::{Gradients, NetParams};
use crate::error::{Error, Result};

/// Adam moments for one network.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Gradients,
    pub v: Gradients,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(params: &NetParams) -> Self {
        Self::with_hyper(params, 0.9, 0.999, 1e-8)
    }

    pub fn with_hyper(params: &NetParams, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            m: Gradients::zeros_like(params),
            v: Gradients::zeros_like(params),
            step: 0,
            beta1,
            beta2,
            eps,
        }
    }

    /// Zeroes both moments and the step counter.
    pub fn reset(&mut self) {
        for (w, b) in self.m.layers.iter_mut().chain(self.v.layers.iter_mut()) {
            w.fill(0.0);
            b.fill(0.0);
        }
        self.step = 0;
    }
}

/// One bias-corrected Adam update of `params` along `grads`.
pub fn adam_step(params: &mut NetParams, grads: &Gradients, state: &mut AdamState, lr: f64) -> Result<()> {
    if grads.layers.len() != params.layers.len() || state.m.layers.len() != params.layers.len() {
        return Err(Error::contract("gradient / optimizer state depth mismatch"));
    }
    for (layer, (gw, gb)) in params.layers.iter().zip(&grads.layers) {
        if layer.weight.dim() != gw.dim() || layer.bias.dim() != gb.dim() {
            return Err(Error::contract("gradient shape mismatch"));
        }
    }
    if !grads.is_finite() {
        return Err(Error::NonFinite("gradients"));
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2, eps) = (state.beta1, state.beta2, state.eps);
    let c1 = 1.0 - b1.powi(t);
    let c2 = 1.0 - b2.powi(t);

    fn update2(p: &mut Array2<f64>, g: &Array2<f64>, m: &mut Array2<f64>, v: &mut Array2<f64>, k: [f64; 6]) {
        let [b1, b2, c1, c2, lr, eps] = k;
        Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        });
    }
    fn update1(p: &mut Array1<f64>, g: &Array1<f64>, m: &mut Array1<f64>, v: &mut Array1<f64>, k: [f64; 6]) {
        let [b1, b2, c1, c2, lr, eps] = k;
        Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        });
    }

    let k = [b1, b2, c1, c2, lr, eps];
    for (((layer, (gw, gb)), (mw, mb)), (vw, vb)) in params
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(state.m.layers.iter_mut())
        .zip(state.v.layers.iter_mut())
    {
        update2(&mut layer.weight, gw, mw, vw, k);
        update1(&mut layer.bias, gb, mb, vb, k);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Dense};
    use ndarray::array;

    fn two_param_net() -> NetParams {
        NetParams {
            layers: vec![Dense {
                weight: array![[0.5]],
                bias: array![-0.25],
                activation: Activation::Identity,
            }],
        }
    }

    fn grads(w: f64, b: f64) -> Gradients {
        Gradients {
            layers: vec![(array![[w]], array![b])],
        }
    }

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut p = two_param_net();
        let mut st = AdamState::new(&p);
        adam_step(&mut p, &grads(0.0, 0.0), &mut st, 1e-3).unwrap();
        assert_eq!(p, two_param_net());
    }

    #[test]
    fn matches_hand_recurrence_for_two_steps() {
        let lr = 0.01;
        let mut p = two_param_net();
        let mut st = AdamState::new(&p);
        adam_step(&mut p, &grads(2.0, -0.5), &mut st, lr).unwrap();
        // Step 1: m_hat = g, v_hat = g^2, so the update is lr * g / (|g| + eps).
        let w1 = 0.5 - lr * 2.0 / (2.0 + 1e-8);
        let b1 = -0.25 + lr * 0.5 / (0.5 + 1e-8);
        assert!((p.layers[0].weight[[0, 0]] - w1).abs() < 1e-15);
        assert!((p.layers[0].bias[0] - b1).abs() < 1e-15);

        adam_step(&mut p, &grads(1.0, 0.0), &mut st, lr).unwrap();
        // Step 2, weight: m = 0.9*0.2 + 0.1*1 = 0.28, v = 0.999*0.004 + 0.001*1 = 0.004996
        let m_hat = 0.28 / (1.0 - 0.81);
        let v_hat: f64 = 0.004996 / (1.0 - 0.998001);
        let w2 = w1 - lr * m_hat / (v_hat.sqrt() + 1e-8);
        assert!((p.layers[0].weight[[0, 0]] - w2).abs() < 1e-12);
        // Step 2, bias: m = 0.9*(-0.05) = -0.045, v = 0.999*0.00025
        let m_hat = -0.045 / (1.0 - 0.81);
        let v_hat: f64 = 0.999 * 0.00025 / (1.0 - 0.998001);
        let b2 = b1 - lr * m_hat / (v_hat.sqrt() + 1e-8);
        assert!((p.layers[0].bias[0] - b2).abs() < 1e-12);
    }

    #[test]
    fn identical_runs_identical_trajectories() {
        let run = || {
            let mut p = two_param_net();
            let mut st = AdamState::new(&p);
            for k in 0..50 {
                let g = (k as f64 * 0.37).sin();
                adam_step(&mut p, &grads(g, -g), &mut st, 1e-3).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn non_finite_gradients_are_rejected() {
        let mut p = two_param_net();
        let mut st = AdamState::new(&p);
        assert!(matches!(
            adam_step(&mut p, &grads(f64::NAN, 0.0), &mut st, 1e-3),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn reset_clears_moments() {
        let mut p = two_param_net();
        let mut st = AdamState::new(&p);
        adam_step(&mut p, &grads(1.0, 1.0), &mut st, 1e-3).unwrap();
        st.reset();
        assert_eq!(st, AdamState::new(&p));
    }
}
