use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Relu => "relu",
            Activation::Sigmoid => "sigmoid",
            Activation::Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "relu" => Some(Activation::Relu),
            "sigmoid" => Some(Activation::Sigmoid),
            "identity" => Some(Activation::Identity),
            _ => None,
        }
    }

    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Relu => z.mapv_inplace(|v| v.max(0.0)),
            Activation::Sigmoid => z.mapv_inplace(|v| 1.0 / (1.0 + (-v).exp())),
            Activation::Identity => {}
        }
    }

    /// Multiplies `grad` by the activation derivative, expressed through the
    /// activation output `a`.
    fn backprop(self, grad: &mut Array2<f64>, a: &Array2<f64>) {
        match self {
            Activation::Relu => Zip::from(grad).and(a).for_each(|g, &a| {
                if a <= 0.0 {
                    *g = 0.0;
                }
            }),
            Activation::Sigmoid => Zip::from(grad).and(a).for_each(|g, &a| *g *= a * (1.0 - a)),
            Activation::Identity => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            activation,
        }
    }

    pub fn param_count(&self) -> usize {
        self.in_dim * self.out_dim + self.out_dim
    }
}

/// `input -> hidden... (ReLU) -> output (out_act)`.
pub fn mlp_spec(input: usize, hidden: &[usize], output: usize, out_act: Activation) -> Vec<LayerSpec> {
    let mut dims = Vec::with_capacity(hidden.len() + 2);
    dims.push(input);
    dims.extend_from_slice(hidden);
    dims.push(output);
    let last = dims.len() - 2;
    dims.windows(2)
        .enumerate()
        .map(|(i, w)| {
            let act = if i == last { out_act } else { Activation::Relu };
            LayerSpec::new(w[0], w[1], act)
        })
        .collect()
}

pub fn validate_spec(spec: &[LayerSpec]) -> Result<()> {
    for (i, l) in spec.iter().enumerate() {
        if l.in_dim == 0 || l.out_dim == 0 {
            return Err(Error::config(format!("layer[{i}]"), "dimensions must be positive"));
        }
    }
    for (i, w) in spec.windows(2).enumerate() {
        if w[0].out_dim != w[1].in_dim {
            return Err(Error::config(
                format!("layer[{}]", i + 1),
                format!("in_dim {} does not chain from out_dim {}", w[1].in_dim, w[0].out_dim),
            ));
        }
    }
    Ok(())
}

pub fn spec_param_count(spec: &[LayerSpec]) -> usize {
    spec.iter().map(LayerSpec::param_count).sum()
}

/// Weight matrix is `out_dim x in_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl Dense {
    pub fn spec(&self) -> LayerSpec {
        LayerSpec::new(self.weight.ncols(), self.weight.nrows(), self.activation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetParams {
    pub layers: Vec<Dense>,
}

/// Per-layer inputs and activation outputs of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Array2<f64>,
    outputs: Vec<Array2<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &Array2<f64> {
        self.outputs.last().unwrap_or(&self.input)
    }

    pub fn into_output(mut self) -> Array2<f64> {
        self.outputs.pop().unwrap_or(self.input)
    }

    fn layer_input(&self, l: usize) -> &Array2<f64> {
        if l == 0 {
            &self.input
        } else {
            &self.outputs[l - 1]
        }
    }
}

/// Same shapes as [`NetParams`]; holds weight and bias gradients per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

impl Gradients {
    pub fn zeros_like(params: &NetParams) -> Self {
        Self {
            layers: params
                .layers
                .iter()
                .map(|l| (Array2::zeros(l.weight.raw_dim()), Array1::zeros(l.bias.raw_dim())))
                .collect(),
        }
    }

    pub fn global_norm(&self) -> f64 {
        self.layers
            .iter()
            .map(|(w, b)| w.iter().chain(b.iter()).map(|x| x * x).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Rescales so the global L2 norm is at most `max_norm`; returns the
    /// pre-clip norm.
    pub fn clip_global_norm(&mut self, max_norm: f64) -> f64 {
        let norm = self.global_norm();
        if norm > max_norm && norm.is_finite() {
            let s = max_norm / norm;
            for (w, b) in &mut self.layers {
                w.mapv_inplace(|x| x * s);
                b.mapv_inplace(|x| x * s);
            }
        }
        norm
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|(w, b)| w.iter().chain(b.iter()).all(|x| x.is_finite()))
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in &self.layers {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }
}

impl NetParams {
    /// Uniform fan-in initialization `U(-1/sqrt(in), 1/sqrt(in))`, zero biases.
    pub fn init<R: Rng + ?Sized>(spec: &[LayerSpec], rng: &mut R) -> Result<Self> {
        validate_spec(spec)?;
        let layers = spec
            .iter()
            .map(|l| {
                let bound = 1.0 / (l.in_dim as f64).sqrt();
                let weight = Array2::from_shape_simple_fn((l.out_dim, l.in_dim), || {
                    rng.random_range(-bound..=bound)
                });
                Dense {
                    weight,
                    bias: Array1::zeros(l.out_dim),
                    activation: l.activation,
                }
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn spec(&self) -> Vec<LayerSpec> {
        self.layers.iter().map(Dense::spec).collect()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn input_dim(&self) -> Option<usize> {
        self.layers.first().map(|l| l.weight.ncols())
    }

    pub fn output_dim(&self) -> Option<usize> {
        self.layers.last().map(|l| l.weight.nrows())
    }

    /// Forward pass over a batch (one row per sample).
    pub fn forward(&self, input: ArrayView2<'_, f64>) -> Result<ForwardCache> {
        if let Some(d) = self.input_dim() {
            if input.ncols() != d {
                return Err(Error::contract(format!(
                    "input width {} != network input {d}",
                    input.ncols()
                )));
            }
        }
        let input = input.to_owned();
        let mut outputs: Vec<Array2<f64>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let x = outputs.last().unwrap_or(&input);
            let mut z = x.dot(&layer.weight.t());
            z += &layer.bias;
            layer.activation.apply(&mut z);
            outputs.push(z);
        }
        Ok(ForwardCache { input, outputs })
    }

    pub fn forward_one(&self, input: &[f64]) -> Result<Vec<f64>> {
        let view = ArrayView2::from_shape((1, input.len()), input)
            .map_err(|e| Error::contract(e.to_string()))?;
        Ok(self.forward(view)?.into_output().into_raw_vec_and_offset().0)
    }

    /// Backpropagates `output_grad` (dLoss/dOutput, one row per sample)
    /// through the cached pass. Gradients are summed over the batch.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_grad: ArrayView2<'_, f64>,
    ) -> Result<(Gradients, Array2<f64>)> {
        if cache.outputs.len() != self.layers.len() {
            return Err(Error::contract("forward cache does not match network depth"));
        }
        for (l, layer) in self.layers.iter().enumerate() {
            let (x, a) = (cache.layer_input(l), &cache.outputs[l]);
            if x.ncols() != layer.weight.ncols() || a.ncols() != layer.weight.nrows() {
                return Err(Error::contract("forward cache shapes do not match network"));
            }
        }
        if output_grad.dim() != cache.output().dim() {
            return Err(Error::contract(format!(
                "output gradient shape {:?} != output shape {:?}",
                output_grad.dim(),
                cache.output().dim()
            )));
        }
        let mut grad = output_grad.to_owned();
        let mut layers = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate().rev() {
            layer.activation.backprop(&mut grad, &cache.outputs[l]);
            let dw = grad.t().dot(cache.layer_input(l));
            let db = grad.sum_axis(Axis(0));
            grad = grad.dot(&layer.weight);
            layers.push((dw, db));
        }
        layers.reverse();
        Ok((Gradients { layers }, grad))
    }

    /// Canonical layout: layer by layer, weights row-major then biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend(l.weight.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn unflatten(spec: &[LayerSpec], flat: &[f64]) -> Result<Self> {
        validate_spec(spec)?;
        let expected = spec_param_count(spec);
        if flat.len() != expected {
            return Err(Error::contract(format!(
                "flat vector has {} entries, architecture needs {expected}",
                flat.len()
            )));
        }
        let mut offset = 0;
        let layers = spec
            .iter()
            .map(|l| {
                let nw = l.in_dim * l.out_dim;
                let weight = Array2::from_shape_vec((l.out_dim, l.in_dim), flat[offset..offset + nw].to_vec())
                    .expect("length checked");
                offset += nw;
                let bias = Array1::from(flat[offset..offset + l.out_dim].to_vec());
                offset += l.out_dim;
                Dense {
                    weight,
                    bias,
                    activation: l.activation,
                }
            })
            .collect();
        Ok(Self { layers })
    }

    /// Overwrites parameters in place from a canonical flat vector.
    pub fn load_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::contract(format!(
                "flat vector has {} entries, network has {}",
                flat.len(),
                self.param_count()
            )));
        }
        let mut it = flat.iter();
        for l in &mut self.layers {
            for (dst, src) in l.weight.iter_mut().chain(l.bias.iter_mut()).zip(&mut it) {
                *dst = *src;
            }
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &NetParams) -> Result<()> {
        if self.spec() != other.spec() {
            return Err(Error::contract("network architectures differ"));
        }
        Ok(())
    }

    /// `self <- tau * online + (1 - tau) * self`.
    pub fn soft_update_from(&mut self, online: &NetParams, tau: f64) -> Result<()> {
        self.check_same_shape(online)?;
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::contract(format!("tau must lie in [0, 1], got {tau}")));
        }
        for (t, o) in self.layers.iter_mut().zip(&online.layers) {
            Zip::from(&mut t.weight)
                .and(&o.weight)
                .for_each(|t, &o| *t = tau * o + (1.0 - tau) * *t);
            Zip::from(&mut t.bias)
                .and(&o.bias)
                .for_each(|t, &o| *t = tau * o + (1.0 - tau) * *t);
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weight.iter().chain(l.bias.iter()).all(|x| x.is_finite()))
    }
}

/// Blended copy of `target` moved toward `online` by `tau`.
pub fn soft_update(target: &NetParams, online: &NetParams, tau: f64) -> Result<NetParams> {
    let mut out = target.clone();
    out.soft_update_from(online, tau)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{rng_for, Stream};
    use ndarray::array;

    #[test]
    fn full_size_actor_parameter_count() {
        let spec = mlp_spec(10, &[400, 300], 5, Activation::Sigmoid);
        assert_eq!(spec_param_count(&spec), 126_205);
        let p = NetParams::init(&spec, &mut rng_for(0, Stream::Init)).unwrap();
        assert_eq!(p.param_count(), 126_205);
        assert_eq!(p.flatten().len(), 126_205);
    }

    #[test]
    fn smallest_and_empty_nets() {
        let spec = [LayerSpec::new(1, 1, Activation::Identity)];
        let p = NetParams::init(&spec, &mut rng_for(0, Stream::Init)).unwrap();
        assert_eq!(p.param_count(), 2);
        let empty = NetParams::init(&[], &mut rng_for(0, Stream::Init)).unwrap();
        assert!(empty.flatten().is_empty());
        assert_eq!(NetParams::unflatten(&[], &[]).unwrap(), empty);
    }

    #[test]
    fn init_is_bounded_and_seeded() {
        let spec = mlp_spec(16, &[8], 4, Activation::Identity);
        let a = NetParams::init(&spec, &mut rng_for(5, Stream::Init)).unwrap();
        let b = NetParams::init(&spec, &mut rng_for(5, Stream::Init)).unwrap();
        assert_eq!(a, b);
        assert!(a.layers[0].weight.iter().all(|w| w.abs() <= 0.25));
        assert!(a.layers[0].bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn unchained_spec_is_rejected() {
        let spec = [
            LayerSpec::new(3, 4, Activation::Relu),
            LayerSpec::new(5, 1, Activation::Identity),
        ];
        assert!(matches!(
            NetParams::init(&spec, &mut rng_for(0, Stream::Init)),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn identity_layer_is_identity() {
        let net = NetParams {
            layers: vec![Dense {
                weight: Array2::eye(3),
                bias: Array1::zeros(3),
                activation: Activation::Identity,
            }],
        };
        assert_eq!(net.forward_one(&[1.5, -2.0, 0.25]).unwrap(), vec![1.5, -2.0, 0.25]);
        let cache = net.forward(array![[1.0, 2.0, 3.0]].view()).unwrap();
        let g = array![[0.5, -1.0, 2.0]];
        let (_, gin) = net.backward(&cache, g.view()).unwrap();
        assert_eq!(gin, g);
    }

    #[test]
    fn relu_clamps_negatives() {
        let net = NetParams {
            layers: vec![Dense {
                weight: Array2::eye(2),
                bias: Array1::zeros(2),
                activation: Activation::Relu,
            }],
        };
        assert_eq!(net.forward_one(&[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
    }

    #[test]
    fn hand_computed_two_layer_net() {
        // h = relu([[1, -1], [2, 0.5]] x + [0, -1]); y = [3, -2] h + 0.5
        let net = NetParams {
            layers: vec![
                Dense {
                    weight: array![[1.0, -1.0], [2.0, 0.5]],
                    bias: array![0.0, -1.0],
                    activation: Activation::Relu,
                },
                Dense {
                    weight: array![[3.0, -2.0]],
                    bias: array![0.5],
                    activation: Activation::Identity,
                },
            ],
        };
        // x = [1, 2]: pre = [-1, 2.0]; h = [0, 2]; y = -4 + 0.5
        assert_eq!(net.forward_one(&[1.0, 2.0]).unwrap(), vec![-3.5]);
        // x = [3, 1]: pre = [2, 5.5]; h = [2, 5.5]; y = 6 - 11 + 0.5
        assert_eq!(net.forward_one(&[3.0, 1.0]).unwrap(), vec![-4.5]);
    }

    #[test]
    fn zero_output_gradient_gives_zero_gradients() {
        let spec = mlp_spec(4, &[8], 3, Activation::Sigmoid);
        let net = NetParams::init(&spec, &mut rng_for(1, Stream::Init)).unwrap();
        let x = Array2::from_elem((5, 4), 0.3);
        let cache = net.forward(x.view()).unwrap();
        let (g, gin) = net.backward(&cache, Array2::zeros((5, 3)).view()).unwrap();
        assert_eq!(g.global_norm(), 0.0);
        assert!(gin.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_input_and_cache_are_rejected() {
        let spec = mlp_spec(4, &[8], 3, Activation::Identity);
        let net = NetParams::init(&spec, &mut rng_for(1, Stream::Init)).unwrap();
        assert!(net.forward(Array2::zeros((1, 5)).view()).is_err());

        let other = NetParams::init(&mlp_spec(4, &[6], 3, Activation::Identity), &mut rng_for(1, Stream::Init))
            .unwrap();
        let cache = other.forward(Array2::zeros((1, 4)).view()).unwrap();
        assert!(matches!(
            net.backward(&cache, Array2::zeros((1, 3)).view()),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn soft_update_boundaries() {
        let spec = mlp_spec(3, &[4], 2, Activation::Identity);
        let t = NetParams::init(&spec, &mut rng_for(1, Stream::Init)).unwrap();
        let o = NetParams::init(&spec, &mut rng_for(2, Stream::Init)).unwrap();
        assert_eq!(soft_update(&t, &o, 1.0).unwrap(), o);
        assert_eq!(soft_update(&t, &o, 0.0).unwrap(), t);

        let scalar = |v: f64| NetParams {
            layers: vec![Dense {
                weight: array![[v]],
                bias: array![v],
                activation: Activation::Identity,
            }],
        };
        assert_eq!(soft_update(&scalar(2.0), &scalar(4.0), 0.5).unwrap(), scalar(3.0));
        assert!(soft_update(&t, &scalar(1.0), 0.5).is_err());
    }

    #[test]
    fn unflatten_rejects_bad_length() {
        let spec = mlp_spec(3, &[4], 2, Activation::Identity);
        assert!(NetParams::unflatten(&spec, &[0.0; 5]).is_err());
    }

    #[test]
    fn clip_global_norm_caps_the_norm() {
        let spec = mlp_spec(3, &[4], 2, Activation::Identity);
        let net = NetParams::init(&spec, &mut rng_for(1, Stream::Init)).unwrap();
        let mut g = Gradients::zeros_like(&net);
        g.layers[0].0.fill(10.0);
        let before = g.clip_global_norm(1.0);
        assert!(before > 1.0);
        assert!((g.global_norm() - 1.0).abs() < 1e-12);
    }
}
