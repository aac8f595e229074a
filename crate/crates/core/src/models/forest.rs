//! Bagged regression trees with per-split feature subsampling.

use ndarray::{Array1, ArrayView2};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{RegressionTree, TreeParams};
use crate::rng::{self, stable_mean};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub min_samples_leaf: usize,
    /// Features tried per split; `None` means `⌈p/3⌉`.
    pub max_features: Option<usize>,
    pub max_depth: Option<usize>,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 100,
            min_samples_leaf: 2,
            max_features: None,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<RegressionTree>,
    /// Mean per-tree normalized impurity decrease, before final normalization.
    raw_importance: Vec<f64>,
}

impl RandomForest {
    /// Tree `t` uses stream `t + 1` of `seed` for its bootstrap sample and
    /// feature draws.
    pub fn fit(x: ArrayView2<f64>, y: &Array1<f64>, cfg: &ForestConfig, seed: u64) -> Self {
        let (n, p) = x.dim();
        let params = TreeParams {
            max_depth: cfg.max_depth,
            min_samples_leaf: cfg.min_samples_leaf,
            max_features: cfg.max_features.unwrap_or(p.div_ceil(3)).clamp(1, p),
        };
        let y = y.as_slice().expect("contiguous targets");
        let fitted: Vec<(RegressionTree, Vec<f64>)> = (0..cfg.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng::stream(seed, t as u64 + 1);
                let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                RegressionTree::fit(x, y, bootstrap, params, Some(&mut rng))
            })
            .collect();

        let mut raw_importance = vec![0.0; p];
        for (_, imp) in &fitted {
            let total: f64 = imp.iter().sum();
            if total > 0.0 {
                for (acc, v) in raw_importance.iter_mut().zip(imp) {
                    *acc += v / total;
                }
            }
        }
        let n_trees = fitted.len().max(1) as f64;
        raw_importance.iter_mut().for_each(|v| *v /= n_trees);
        Self {
            trees: fitted.into_iter().map(|(t, _)| t).collect(),
            raw_importance,
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        x.rows()
            .into_iter()
            .map(|row| stable_mean(self.trees.iter().map(|t| t.predict_row(row))))
            .collect()
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub(crate) fn raw_importance(&self) -> &[f64] {
        &self.raw_importance
    }
}
