//! Linear support-vector regression: ε-insensitive loss with an L2 penalty,
//! trained by full-batch subgradient descent.
//!
//! The target is standardized internally, so `epsilon` is measured in
//! training-target standard deviations.

use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::rng::stable_mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrConfig {
    pub epsilon: f64,
    pub l2_penalty: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for SvrConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            l2_penalty: 1e-3,
            learning_rate: 0.1,
            epochs: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSvr {
    weights: Vec<f64>,
    bias: f64,
    target_mean: f64,
    target_scale: f64,
    /// Objective value of the retained iterate at each recorded epoch.
    pub objective_history: Vec<f64>,
}

fn objective(x: ArrayView2<f64>, y: &[f64], w: &[f64], b: f64, cfg: &SvrConfig) -> f64 {
    let loss: f64 = x
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, t)| {
            let pred = b + row.iter().zip(w).map(|(v, c)| v * c).sum::<f64>();
            ((t - pred).abs() - cfg.epsilon).max(0.0)
        })
        .sum::<f64>()
        / y.len() as f64;
    loss + 0.5 * cfg.l2_penalty * w.iter().map(|v| v * v).sum::<f64>()
}

impl LinearSvr {
    /// Subgradient steps use the `lr / √t` schedule; the best iterate seen
    /// (by objective) is kept, since subgradient steps need not descend.
    pub fn fit(x: ArrayView2<f64>, y: &Array1<f64>, cfg: &SvrConfig) -> Self {
        let (n, p) = x.dim();
        let target_mean = stable_mean(y.iter().copied());
        let var = y.iter().map(|v| (v - target_mean).powi(2)).sum::<f64>() / n as f64;
        let target_scale = if var > 0.0 { var.sqrt() } else { 1.0 };
        let z: Vec<f64> = y.iter().map(|v| (v - target_mean) / target_scale).collect();

        let mut w = vec![0.0; p];
        let mut b = 0.0;
        let mut best = (objective(x, &z, &w, b, cfg), w.clone(), b);
        let mut history = vec![best.0];
        for epoch in 0..cfg.epochs {
            let mut gw = vec![0.0; p];
            let mut gb = 0.0;
            for (row, t) in x.rows().into_iter().zip(&z) {
                let pred = b + row.iter().zip(&w).map(|(v, c)| v * c).sum::<f64>();
                let r = t - pred;
                if r.abs() > cfg.epsilon {
                    let s = -r.signum();
                    gb += s;
                    gw.iter_mut().zip(row).for_each(|(g, v)| *g += s * v);
                }
            }
            let step = cfg.learning_rate / ((epoch + 1) as f64).sqrt();
            for (wj, gj) in w.iter_mut().zip(&gw) {
                *wj -= step * (gj / n as f64 + cfg.l2_penalty * *wj);
            }
            b -= step * gb / n as f64;
            let obj = objective(x, &z, &w, b, cfg);
            if obj < best.0 {
                best = (obj, w.clone(), b);
            }
            history.push(best.0);
        }
        Self {
            weights: best.1,
            bias: best.2,
            target_mean,
            target_scale,
            objective_history: history,
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                let z = self.bias + row.iter().zip(&self.weights).map(|(v, c)| v * c).sum::<f64>();
                self.target_mean + self.target_scale * z
            })
            .collect()
    }
}
