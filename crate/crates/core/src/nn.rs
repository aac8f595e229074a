//! Dense feed-forward networks with manual backpropagation.
//!
//! Rows of the input matrix are samples. Weights are stored `inputs ×
//! outputs` so a layer computes `x·W + b`.

use ndarray::{Array1, Array2, Axis};
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Self::Identity => z,
            Self::Relu => z.max(0.0),
            Self::Sigmoid => sigmoid(z),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Sigmoid => a * (1.0 - a),
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub layers: Vec<Dense>,
}

/// Per-layer `(∂W, ∂b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Array2<f64>, Array1<f64>)>,
}

pub struct ForwardCache {
    inputs: Vec<Array2<f64>>,
    pre: Vec<Array2<f64>>,
    outputs: Vec<Array2<f64>>,
}

impl Network {
    /// He-normal weights for ReLU layers, Glorot-normal otherwise; zero biases.
    pub fn new(sizes: &[usize], hidden: Activation, output: Activation, rng: &mut Rng) -> Self {
        assert!(sizes.len() >= 2, "a network needs input and output sizes");
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(k, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let activation = if k + 2 == sizes.len() { output } else { hidden };
                let std = match activation {
                    Activation::Relu => (2.0 / fan_in as f64).sqrt(),
                    _ => (2.0 / (fan_in + fan_out) as f64).sqrt(),
                };
                let normal = Normal::new(0.0, std).expect("positive std");
                Dense {
                    weights: Array2::from_shape_fn((fan_in, fan_out), |_| normal.sample(rng)),
                    bias: Array1::zeros(fan_out),
                    activation,
                }
            })
            .collect();
        Self { layers }
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].weights.nrows()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().expect("non-empty").weights.ncols()
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        self.layers.iter().fold(x.clone(), |a, layer| {
            let mut z = a.dot(&layer.weights) + &layer.bias;
            z.mapv_inplace(|v| layer.activation.apply(v));
            z
        })
    }

    pub fn forward_cached(&self, x: &Array2<f64>) -> (Array2<f64>, ForwardCache) {
        let mut cache = ForwardCache {
            inputs: Vec::with_capacity(self.layers.len()),
            pre: Vec::with_capacity(self.layers.len()),
            outputs: Vec::with_capacity(self.layers.len()),
        };
        let mut a = x.clone();
        for layer in &self.layers {
            let z = a.dot(&layer.weights) + &layer.bias;
            let out = z.mapv(|v| layer.activation.apply(v));
            cache.inputs.push(a);
            cache.pre.push(z);
            cache.outputs.push(out.clone());
            a = out;
        }
        (a, cache)
    }

    /// Backpropagates `∂L/∂output`; returns parameter gradients and `∂L/∂input`.
    pub fn backward(&self, cache: &ForwardCache, grad_output: &Array2<f64>) -> (Gradients, Array2<f64>) {
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = grad_output.clone();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let mut dz = delta;
            ndarray::Zip::from(&mut dz)
                .and(&cache.pre[k])
                .and(&cache.outputs[k])
                .for_each(|d, &z, &a| *d *= layer.activation.derivative(z, a));
            let dw = cache.inputs[k].t().dot(&dz);
            let db = dz.sum_axis(Axis(0));
            delta = dz.dot(&layer.weights.t());
            grads.push((dw, db));
        }
        grads.reverse();
        (Gradients { layers: grads }, delta)
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend(l.weights.iter());
            out.extend(l.bias.iter());
        }
        out
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.num_params(), "parameter count mismatch");
        let mut it = params.iter();
        for l in &mut self.layers {
            l.weights.iter_mut().for_each(|w| *w = *it.next().expect("sized"));
            l.bias.iter_mut().for_each(|b| *b = *it.next().expect("sized"));
        }
    }

    pub fn sgd_step(&mut self, grads: &Gradients, lr: f64) {
        for (l, (dw, db)) in self.layers.iter_mut().zip(&grads.layers) {
            l.weights.scaled_add(-lr, dw);
            l.bias.scaled_add(-lr, db);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }
}

impl Gradients {
    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (dw, db) in &self.layers {
            out.extend(dw.iter());
            out.extend(db.iter());
        }
        out
    }
}

/// Adam optimizer state for one network.
#[derive(Debug, Clone)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: i32,
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
}

impl Adam {
    pub fn new(net: &Network, lr: f64, beta1: f64) -> Self {
        let zeros: Vec<_> = net
            .layers
            .iter()
            .map(|l| (Array2::zeros(l.weights.raw_dim()), Array1::zeros(l.bias.len())))
            .collect();
        Self {
            lr,
            beta1,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        }
    }

    /// Descends along `grads`.
    pub fn step(&mut self, net: &mut Network, grads: &Gradients) {
        self.t += 1;
        let (b1, b2) = (self.beta1, self.beta2);
        let c1 = 1.0 - b1.powi(self.t);
        let c2 = 1.0 - b2.powi(self.t);
        let step = self.lr * c2.sqrt() / c1;
        let eps = self.eps;
        for ((layer, (dw, db)), ((mw, mb), (vw, vb))) in net
            .layers
            .iter_mut()
            .zip(&grads.layers)
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            ndarray::Zip::from(&mut layer.weights)
                .and(dw)
                .and(mw)
                .and(vw)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= step * *m / (v.sqrt() + eps);
                });
            ndarray::Zip::from(&mut layer.bias)
                .and(db)
                .and(mb)
                .and(vb)
                .for_each(|w, &g, m, v| {
                    *m = b1 * *m + (1.0 - b1) * g;
                    *v = b2 * *v + (1.0 - b2) * g * g;
                    *w -= step * *m / (v.sqrt() + eps);
                });
        }
    }
}

/// Standard-normal matrix from `rng`.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample::<f64, _>(rand_distr::StandardNormal))
}
