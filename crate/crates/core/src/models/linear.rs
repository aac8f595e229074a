//! Ordinary least squares with intercept, solved by Householder QR.

use ndarray::{Array1, Array2, ArrayView2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    /// Columns numerically dependent on earlier ones get coefficient 0.
    pub fn fit(x: ArrayView2<f64>, y: &Array1<f64>) -> Self {
        let (n, p) = x.dim();
        let cols = p + 1;
        let mut a = Array2::zeros((n, cols));
        a.column_mut(0).fill(1.0);
        a.slice_mut(ndarray::s![.., 1..]).assign(&x);
        let mut b = y.clone();

        // `pivot_row[k]` is the triangular row owned by column k, if any.
        let mut pivot_row: Vec<Option<usize>> = vec![None; cols];
        let mut r = 0;
        for k in 0..cols {
            if r >= n {
                break;
            }
            let norm = (r..n).map(|i| a[[i, k]].powi(2)).sum::<f64>().sqrt();
            let col_norm = (0..n).map(|i| a[[i, k]].powi(2)).sum::<f64>().sqrt();
            if col_norm == 0.0 || norm <= 1e-10 * col_norm {
                continue;
            }
            let alpha = if a[[r, k]] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (r..n).map(|i| a[[i, k]]).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|t| t * t).sum();
            if vnorm2 > 0.0 {
                for j in k..cols {
                    let dot: f64 = (r..n).map(|i| v[i - r] * a[[i, j]]).sum();
                    let f = 2.0 * dot / vnorm2;
                    for i in r..n {
                        a[[i, j]] -= f * v[i - r];
                    }
                }
                let dot: f64 = (r..n).map(|i| v[i - r] * b[i]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in r..n {
                    b[i] -= f * v[i - r];
                }
            }
            pivot_row[k] = Some(r);
            r += 1;
        }

        let mut beta = vec![0.0; cols];
        for k in (0..cols).rev() {
            let Some(row) = pivot_row[k] else {
                continue;
            };
            let tail: f64 = (k + 1..cols).map(|j| a[[row, j]] * beta[j]).sum();
            beta[k] = (b[row] - tail) / a[[row, k]];
        }
        Self {
            intercept: beta[0],
            coefficients: beta[1..].to_vec(),
        }
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Array1<f64> {
        x.rows()
            .into_iter()
            .map(|row| {
                self.intercept
                    + row
                        .iter()
                        .zip(&self.coefficients)
                        .map(|(v, c)| v * c)
                        .sum::<f64>()
            })
            .collect()
    }
}
