#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weatherwise::bwm::BwmInstance;

/// Raw comparison vectors for one decision-maker.
#[derive(Debug, Clone)]
pub struct RawInstance {
    pub best: usize,
    pub worst: usize,
    pub best_to_others: Vec<i64>,
    pub others_to_worst: Vec<i64>,
}

impl RawInstance {
    pub fn build(&self) -> BwmInstance {
        let n = self.best_to_others.len();
        BwmInstance::new(
            (0..n).map(|j| format!("c{j}")).collect(),
            self.best,
            self.worst,
            self.best_to_others.clone(),
            self.others_to_worst.clone(),
        )
        .expect("generated instance is valid")
    }
}

fn pick_best_worst(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let best = rng.random_range(0..n);
    let mut worst = rng.random_range(0..n - 1);
    if worst >= best {
        worst += 1;
    }
    (best, worst)
}

/// Any structurally valid instance: every entry between 1 and `a_BW`.
pub fn random_valid(rng: &mut ChaCha8Rng, n: usize) -> RawInstance {
    let (best, worst) = pick_best_worst(rng, n);
    let a_bw = rng.random_range(1..=9i64);
    let mut bo = vec![0; n];
    let mut ow = vec![0; n];
    for j in 0..n {
        bo[j] = rng.random_range(1..=a_bw);
        ow[j] = rng.random_range(1..=a_bw);
    }
    bo[best] = 1;
    ow[worst] = 1;
    bo[worst] = a_bw;
    ow[best] = a_bw;
    RawInstance {
        best,
        worst,
        best_to_others: bo,
        others_to_worst: ow,
    }
}

/// `a_Bj · a_jW = a_BW` for every `j`: each `a_Bj` divides `a_BW`.
pub fn random_consistent(rng: &mut ChaCha8Rng, n: usize) -> RawInstance {
    let (best, worst) = pick_best_worst(rng, n);
    let a_bw = rng.random_range(1..=9i64);
    let divisors: Vec<i64> = (1..=a_bw).filter(|d| a_bw % d == 0).collect();
    let mut bo = vec![0; n];
    let mut ow = vec![0; n];
    for j in 0..n {
        let d = divisors[rng.random_range(0..divisors.len())];
        bo[j] = d;
        ow[j] = a_bw / d;
    }
    bo[best] = 1;
    ow[best] = a_bw;
    bo[worst] = a_bw;
    ow[worst] = 1;
    RawInstance {
        best,
        worst,
        best_to_others: bo,
        others_to_worst: ow,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Brute-force minimax solver, independent of the simplex.
///
/// For fixed `(w_B, w_W)` every other weight is confined to an interval that
/// depends on `ξ`, so the smallest feasible `ξ` follows by bisection. The
/// outer minimisation over `(w_B, w_W)` is a grid search refined around the
/// incumbent until the spacing is below `1e-6`.
pub struct GridOracle<'a> {
    inst: &'a RawInstance,
    others: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub weights: Vec<f64>,
    pub xi: f64,
}

impl<'a> GridOracle<'a> {
    pub fn new(inst: &'a RawInstance) -> Self {
        let n = inst.best_to_others.len();
        let others = (0..n).filter(|&j| j != inst.best && j != inst.worst).collect();
        Self { inst, others }
    }

    fn intervals(&self, wb: f64, ww: f64, xi: f64) -> Vec<(f64, f64)> {
        self.others
            .iter()
            .map(|&j| {
                let ab = self.inst.best_to_others[j] as f64;
                let aw = self.inst.others_to_worst[j] as f64;
                let lo = ((wb - xi) / ab).max(aw * ww - xi).max(0.0);
                let hi = ((wb + xi) / ab).min(aw * ww + xi);
                (lo, hi)
            })
            .collect()
    }

    fn feasible(&self, wb: f64, ww: f64, xi: f64) -> bool {
        let a_bw = self.inst.best_to_others[self.inst.worst] as f64;
        if (wb - a_bw * ww).abs() > xi {
            return false;
        }
        let rest = 1.0 - wb - ww;
        let iv = self.intervals(wb, ww, xi);
        if iv.iter().any(|(lo, hi)| lo > hi) {
            return false;
        }
        let lo: f64 = iv.iter().map(|p| p.0).sum();
        let hi: f64 = iv.iter().map(|p| p.1).sum();
        lo <= rest + 1e-15 && rest <= hi + 1e-15
    }

    /// Smallest feasible `ξ` for fixed `(w_B, w_W)`, or `None` off the simplex.
    pub fn xi_at(&self, wb: f64, ww: f64) -> Option<f64> {
        if wb < 0.0 || ww < 0.0 || wb + ww > 1.0 + 1e-15 {
            return None;
        }
        if self.others.is_empty() && (wb + ww - 1.0).abs() > 1e-15 {
            return None;
        }
        let (mut lo, mut hi) = (0.0, 10.0);
        if self.feasible(wb, ww, 0.0) {
            return Some(0.0);
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.feasible(wb, ww, mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    fn recover(&self, wb: f64, ww: f64, xi: f64) -> Vec<f64> {
        let n = self.inst.best_to_others.len();
        let mut w = vec![0.0; n];
        w[self.inst.best] = wb;
        w[self.inst.worst] = ww;
        let iv = self.intervals(wb, ww, xi);
        let lo: f64 = iv.iter().map(|p| p.0).sum();
        let hi: f64 = iv.iter().map(|p| p.1).sum();
        let rest = 1.0 - wb - ww;
        let t = if hi > lo { ((rest - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.0 };
        for (&j, (l, h)) in self.others.iter().zip(iv) {
            w[j] = l + t * (h - l);
        }
        w
    }

    pub fn solve(&self) -> OracleSolution {
        if self.others.is_empty() {
            let a = self.inst.best_to_others[self.inst.worst] as f64;
            let ww = 1.0 / (1.0 + a);
            return OracleSolution {
                weights: self.recover(1.0 - ww, ww, 0.0),
                xi: 0.0,
            };
        }
        let mut best = (f64::INFINITY, 0.0, 0.0);
        let coarse = 100;
        for i in 0..=coarse {
            for k in 0..=(coarse - i) {
                let (wb, ww) = (i as f64 / coarse as f64, k as f64 / coarse as f64);
                if let Some(xi) = self.xi_at(wb, ww) {
                    if xi < best.0 {
                        best = (xi, wb, ww);
                    }
                }
            }
        }
        // re-centre at each spacing until the incumbent stops moving
        let mut h = 1.0 / coarse as f64;
        while h > 1e-7 {
            h /= 5.0;
            loop {
                let (_, cb, cw) = best;
                for di in -12i32..=12 {
                    for dk in -12i32..=12 {
                        let (wb, ww) = (cb + di as f64 * h, cw + dk as f64 * h);
                        if let Some(xi) = self.xi_at(wb, ww) {
                            if xi < best.0 {
                                best = (xi, wb, ww);
                            }
                        }
                    }
                }
                if best.1 == cb && best.2 == cw {
                    break;
                }
            }
        }
        let (xi, wb, ww) = best;
        OracleSolution {
            weights: self.recover(wb, ww, xi),
            xi,
        }
    }
}

/// Closed form for a fully consistent instance: `w_j ∝ 1 / a_Bj`.
pub fn consistent_closed_form(inst: &RawInstance) -> Vec<f64> {
    let inv: Vec<f64> = inst.best_to_others.iter().map(|a| 1.0 / *a as f64).collect();
    let s: f64 = inv.iter().sum();
    inv.iter().map(|v| v / s).collect()
}

/// Largest absolute deviation of the minimax model at `w`.
pub fn minimax_deviation(inst: &RawInstance, w: &[f64]) -> f64 {
    let (b, wi) = (inst.best, inst.worst);
    (0..w.len())
        .flat_map(|j| {
            [
                (w[b] - inst.best_to_others[j] as f64 * w[j]).abs(),
                (w[j] - inst.others_to_worst[j] as f64 * w[wi]).abs(),
            ]
        })
        .fold(0.0, f64::max)
}
