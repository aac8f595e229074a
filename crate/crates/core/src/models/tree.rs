//! CART regression trees on squared error.
//!
//! Split candidates are scanned feature by feature in ascending index order
//! and thresholds in ascending value order; a candidate replaces the current
//! best only on strictly larger gain, so ties go to the lowest feature and
//! then the lowest threshold.

use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::rng::{stable_mean, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// Features examined per split; all when `>= n_features`.
    pub max_features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

struct Builder<'a> {
    x: ArrayView2<'a, f64>,
    y: &'a [f64],
    params: TreeParams,
    nodes: Vec<Node>,
    /// Total squared-error reduction credited to each feature.
    importance: Vec<f64>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

fn sse(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mean = stable_mean(values.clone());
    values.map(|v| (v - mean).powi(2)).sum()
}

impl Builder<'_> {
    fn build(&mut self, idx: Vec<usize>, depth: usize, rng: &mut Option<&mut Rng>) -> usize {
        let node_id = self.nodes.len();
        let value = stable_mean(idx.iter().map(|&i| self.y[i]));
        self.nodes.push(Node::Leaf { value });

        let depth_ok = self.params.max_depth.is_none_or(|d| depth < d);
        if !depth_ok || idx.len() < 2 * self.params.min_samples_leaf {
            return node_id;
        }
        let Some(best) = self.best_split(&idx, rng) else {
            return node_id;
        };
        self.importance[best.feature] += best.gain;
        let left = self.build(best.left, depth + 1, rng);
        let right = self.build(best.right, depth + 1, rng);
        self.nodes[node_id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        node_id
    }

    fn candidate_features(&self, rng: &mut Option<&mut Rng>) -> Vec<usize> {
        let p = self.x.ncols();
        match rng {
            Some(rng) if self.params.max_features < p => {
                let mut f = sample(&mut **rng, p, self.params.max_features).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..p).collect(),
        }
    }

    fn best_split(&self, idx: &[usize], rng: &mut Option<&mut Rng>) -> Option<BestSplit> {
        let n = idx.len();
        let parent = sse(idx.iter().map(|&i| self.y[i]));
        if parent <= 0.0 {
            return None;
        }
        let min_leaf = self.params.min_samples_leaf.max(1);
        let mut best: Option<(usize, f64, f64, usize)> = None;
        let mut order = idx.to_vec();
        for feature in self.candidate_features(rng) {
            let col = self.x.column(feature);
            order.sort_by(|&a, &b| col[a].total_cmp(&col[b]).then(a.cmp(&b)));
            // shift by the node mean so sums of squares stay well conditioned
            let shift = stable_mean(order.iter().map(|&i| self.y[i]));
            let total: f64 = order.iter().map(|&i| self.y[i] - shift).sum();
            let total_sq: f64 = order.iter().map(|&i| (self.y[i] - shift).powi(2)).sum();
            let mut left_sum = 0.0;
            let mut left_sq = 0.0;
            for k in 0..n - 1 {
                let v = self.y[order[k]] - shift;
                left_sum += v;
                left_sq += v * v;
                let n_left = k + 1;
                let n_right = n - n_left;
                if n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let (lo, hi) = (col[order[k]], col[order[k + 1]]);
                if lo >= hi {
                    continue;
                }
                let right_sum = total - left_sum;
                let right_sq = total_sq - left_sq;
                let child = (left_sq - left_sum * left_sum / n_left as f64)
                    + (right_sq - right_sum * right_sum / n_right as f64);
                let gain = parent - child;
                if best.is_none_or(|(_, _, g, _)| gain > g) {
                    let mid = lo + (hi - lo) / 2.0;
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some((feature, threshold, gain, n_left));
                }
            }
        }
        let (feature, threshold, gain, _) = best?;
        if !(gain > 1e-12 * parent) {
            return None;
        }
        let col = self.x.column(feature);
        let (left, right): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| col[i] <= threshold);
        Some(BestSplit {
            feature,
            threshold,
            gain,
            left,
            right,
        })
    }
}

impl RegressionTree {
    /// Grows a tree on the rows listed in `idx` (repeats allowed). Returns
    /// the tree and the per-feature squared-error reduction.
    pub(crate) fn fit(
        x: ArrayView2<f64>,
        y: &[f64],
        idx: Vec<usize>,
        params: TreeParams,
        mut rng: Option<&mut Rng>,
    ) -> (Self, Vec<f64>) {
        let mut builder = Builder {
            x,
            y,
            params,
            nodes: Vec::new(),
            importance: vec![0.0; x.ncols()],
        };
        builder.build(idx, 0, &mut rng);
        (
            Self {
                nodes: builder.nodes,
            },
            builder.importance,
        )
    }

    pub fn predict_row(&self, row: ArrayView1<f64>) -> f64 {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    id = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    #[cfg(test)]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[cfg(test)]
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], id: usize) -> usize {
            match &nodes[id] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}
