//! Two-hidden-layer ReLU regressor trained by full-batch gradient descent
//! on mean squared error.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::nn::{Activation, Network};
use crate::rng::{self, stable_mean};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: vec![16, 16],
            learning_rate: 0.01,
            epochs: 200,
        }
    }
}

impl MlpConfig {
    pub fn with_epochs(epochs: usize) -> Self {
        Self {
            epochs,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpRegressor {
    pub network: Network,
    target_mean: f64,
    target_scale: f64,
    /// Standardized-target MSE at initialization and after every epoch.
    pub loss_history: Vec<f64>,
    /// Epoch (0 = initialization) whose parameters were retained.
    pub best_epoch: usize,
}

/// Mean squared error of `net` on `(x, y)` and its gradient with respect to
/// the flattened parameters.
pub fn loss_and_gradient(net: &Network, x: &Array2<f64>, y: &Array1<f64>) -> (f64, Vec<f64>) {
    let n = x.nrows() as f64;
    let (out, cache) = net.forward_cached(x);
    let residual = &out.column(0) - y;
    let loss = residual.mapv(|r| r * r).sum() / n;
    let grad_out = residual.mapv(|r| 2.0 * r / n).insert_axis(Axis(1));
    let (grads, _) = net.backward(&cache, &grad_out);
    (loss, grads.flat())
}

/// Mean squared error of `net` on `(x, y)`.
pub fn loss(net: &Network, x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let out = net.forward(x);
    let n = x.nrows() as f64;
    out.column(0)
        .iter()
        .zip(y)
        .map(|(p, t)| (p - t).powi(2))
        .sum::<f64>()
        / n
}

impl MlpRegressor {
    /// Hidden layers start He-initialized; the output layer starts at zero so
    /// the untrained network predicts the training mean. The parameters with
    /// the lowest full-batch training loss are retained.
    pub fn fit(x: ArrayView2<f64>, y: &Array1<f64>, cfg: &MlpConfig, seed: u64) -> Self {
        let n = x.nrows();
        let target_mean = stable_mean(y.iter().copied());
        let var = y.iter().map(|v| (v - target_mean).powi(2)).sum::<f64>() / n as f64;
        let target_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let z = y.mapv(|v| (v - target_mean) / target_scale);
        let x = x.to_owned();

        let mut sizes = vec![x.ncols()];
        sizes.extend(&cfg.hidden);
        sizes.push(1);
        let mut net = Network::new(&sizes, Activation::Relu, Activation::Identity, &mut rng::stream(seed, 0));
        let out = net.layers.last_mut().expect("output layer");
        out.weights.fill(0.0);
        out.bias.fill(0.0);

        let mut best = (loss(&net, &x, &z), net.clone(), 0);
        let mut loss_history = vec![best.0];
        for epoch in 1..=cfg.epochs {
            let (cur, cache) = net.forward_cached(&x);
            let grad_out = ((&cur.column(0) - &z).mapv(|r| 2.0 * r / n as f64)).insert_axis(Axis(1));
            let (grads, _) = net.backward(&cache, &grad_out);
            net.sgd_step(&grads, cfg.learning_rate);
            let l = loss(&net, &x, &z);
            loss_history.push(l);
            if l < best.0 {
                best = (l, net.clone(), epoch);
            }
        }
        Self {
            network: best.1,
            target_mean,
            target_scale,
            loss_history,
            best_epoch: best.2,
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        let out = self.network.forward(&x.to_owned());
        out.column(0)
            .mapv(|v| self.target_mean + self.target_scale * v)
    }

    pub fn final_loss(&self) -> f64 {
        self.loss_history[self.best_epoch]
    }
}
