//! Gradient-boosted regression trees on squared loss.

use ndarray::{Array1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeParams};
use crate::rng::stable_mean;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
}

impl Default for GbtConfig {
    fn default() -> Self {
        Self {
            n_rounds: 200,
            max_depth: 3,
            learning_rate: 0.1,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientBoosting {
    base_score: f64,
    learning_rate: f64,
    trees: Vec<RegressionTree>,
    /// Training MSE before boosting and after each round.
    pub loss_history: Vec<f64>,
}

fn mse(y: &[f64], f: &[f64]) -> f64 {
    y.iter().zip(f).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / y.len() as f64
}

impl GradientBoosting {
    /// Each round fits a tree to the current residuals (the negative squared-
    /// loss gradient) and adds it with shrinkage.
    pub fn fit(x: ArrayView2<f64>, y: &Array1<f64>, cfg: &GbtConfig) -> Self {
        let n = x.nrows();
        let y = y.as_slice().expect("contiguous targets");
        let base_score = stable_mean(y.iter().copied());
        let mut fitted = vec![base_score; n];
        let mut loss_history = vec![mse(y, &fitted)];
        let params = TreeParams {
            max_depth: Some(cfg.max_depth),
            min_samples_leaf: cfg.min_samples_leaf,
            max_features: usize::MAX,
        };
        let mut trees = Vec::with_capacity(cfg.n_rounds);
        for _ in 0..cfg.n_rounds {
            let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(t, f)| t - f).collect();
            let (tree, _) = RegressionTree::fit(x, &residuals, (0..n).collect(), params, None);
            for (f, row) in fitted.iter_mut().zip(x.rows()) {
                *f += cfg.learning_rate * tree.predict_row(row);
            }
            loss_history.push(mse(y, &fitted));
            trees.push(tree);
        }
        Self {
            base_score,
            learning_rate: cfg.learning_rate,
            trees,
            loss_history,
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                self.trees
                    .iter()
                    .fold(self.base_score, |acc, t| acc + self.learning_rate * t.predict_row(row))
            })
            .collect()
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn n_rounds(&self) -> usize {
        self.trees.len()
    }
}
