//! Best-Worst Method weights for a single decision-maker.
//!
//! The decision-maker names a best criterion `B` and a worst criterion `W`,
//! then rates `B` against every criterion (`best_to_others`) and every
//! criterion against `W` (`others_to_worst`) on a 1-9 scale. Weights solve
//!
//! ```text
//! min ξ  s.t.  |w_B − a_Bj·w_j| ≤ ξ,  |w_j − a_jW·w_W| ≤ ξ,  Σ w_j = 1,  w ≥ 0
//! ```
//!
//! with each absolute value split into two linear rows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp::{lp_minimize, LinearProgram, LpError, Sense};
use crate::tolerances::WEIGHT_SUM;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BwmError {
    #[error("best and worst criterion are the same (index {0})")]
    Degenerate(usize),
    #[error("{vector}[{index}] compares a criterion with itself and must be 1, found {value}")]
    SelfComparison {
        vector: &'static str,
        index: usize,
        value: i64,
    },
    #[error("{vector}[{index}] = {value} is outside the 1-9 scale")]
    Scale {
        vector: &'static str,
        index: usize,
        value: i64,
    },
    #[error(
        "best-to-worst rating must be the largest and appear in both vectors: \
         best_to_others[worst] = {best_to_worst}, others_to_worst[best] = {worst_from_best}, {detail}"
    )]
    ReferenceComparison {
        best_to_worst: i64,
        worst_from_best: i64,
        detail: String,
    },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("unknown criterion '{0}'")]
    UnknownCriterion(String),
    #[error("weight domain error: {0}")]
    Domain(String),
    #[error("solver failed: {0}")]
    Solver(#[from] LpError),
    #[error("ξ* = {xi_star} > 0 is impossible when the best-to-worst rating is 1")]
    InconsistencyImpossible { xi_star: f64 },
}

/// Criterion reference in a decision-maker document: a label or an index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CriterionRef {
    Index(usize),
    Label(String),
}

/// Serialized form of one decision-maker's comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BwmDocument {
    #[serde(default)]
    pub decision_maker: Option<String>,
    pub criteria: Vec<String>,
    /// Optional human-readable names, parallel to `criteria`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub best: CriterionRef,
    pub worst: CriterionRef,
    pub best_to_others: Vec<i64>,
    pub others_to_worst: Vec<i64>,
}

/// A structurally valid set of Best-Worst comparisons.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwmInstance {
    criteria: Vec<String>,
    best: usize,
    worst: usize,
    best_to_others: Vec<u8>,
    others_to_worst: Vec<u8>,
}

/// Nonnegative weights summing to one, with the minimax deviation `ξ*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub xi_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BwmSolution {
    pub weights: WeightVector,
    /// The simplex found a second optimal vertex; the weights are one of
    /// several optimal vectors.
    pub multiple_optima: bool,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, xi_star: f64) -> Result<Self, BwmError> {
        if weights.is_empty() {
            return Err(BwmError::Shape("empty weight vector".into()));
        }
        if let Some((j, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(BwmError::Domain(format!("weight {j} is {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM {
            return Err(BwmError::Domain(format!("weights sum to {sum}, not 1")));
        }
        if !(xi_star.is_finite() && xi_star >= 0.0) {
            return Err(BwmError::Domain(format!("ξ* = {xi_star}")));
        }
        Ok(Self { weights, xi_star })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl BwmInstance {
    pub fn new(
        criteria: Vec<String>,
        best: usize,
        worst: usize,
        best_to_others: Vec<i64>,
        others_to_worst: Vec<i64>,
    ) -> Result<Self, BwmError> {
        let n = criteria.len();
        if n < 2 {
            return Err(BwmError::Shape(format!("need at least 2 criteria, found {n}")));
        }
        if best_to_others.len() != n || others_to_worst.len() != n {
            return Err(BwmError::Shape(format!(
                "{n} criteria but {} best-to-others and {} others-to-worst ratings",
                best_to_others.len(),
                others_to_worst.len()
            )));
        }
        if best >= n || worst >= n {
            return Err(BwmError::Shape(format!(
                "best index {best} / worst index {worst} out of range for {n} criteria"
            )));
        }
        if best == worst {
            return Err(BwmError::Degenerate(best));
        }
        for (vector, values) in [
            ("best_to_others", &best_to_others),
            ("others_to_worst", &others_to_worst),
        ] {
            if let Some((index, &value)) = values
                .iter()
                .enumerate()
                .find(|(_, v)| !(1..=9).contains(*v))
            {
                return Err(BwmError::Scale {
                    vector,
                    index,
                    value,
                });
            }
        }
        if best_to_others[best] != 1 {
            return Err(BwmError::SelfComparison {
                vector: "best_to_others",
                index: best,
                value: best_to_others[best],
            });
        }
        if others_to_worst[worst] != 1 {
            return Err(BwmError::SelfComparison {
                vector: "others_to_worst",
                index: worst,
                value: others_to_worst[worst],
            });
        }
        let a_bw = best_to_others[worst];
        let reference_error = |detail: String| BwmError::ReferenceComparison {
            best_to_worst: a_bw,
            worst_from_best: others_to_worst[best],
            detail,
        };
        if others_to_worst[best] != a_bw {
            return Err(reference_error("the two must be equal".into()));
        }
        if let Some(j) = (0..n).find(|&j| best_to_others[j] > a_bw || others_to_worst[j] > a_bw) {
            return Err(reference_error(format!("criterion {j} exceeds it")));
        }
        Ok(Self {
            criteria,
            best,
            worst,
            best_to_others: best_to_others.into_iter().map(|v| v as u8).collect(),
            others_to_worst: others_to_worst.into_iter().map(|v| v as u8).collect(),
        })
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn len(&self) -> usize {
        self.criteria.len()
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    pub fn best(&self) -> usize {
        self.best
    }

    pub fn worst(&self) -> usize {
        self.worst
    }

    pub fn best_to_others(&self) -> &[u8] {
        &self.best_to_others
    }

    pub fn others_to_worst(&self) -> &[u8] {
        &self.others_to_worst
    }

    /// The best-to-worst rating `a_BW`.
    pub fn best_to_worst(&self) -> u8 {
        self.best_to_others[self.worst]
    }

    /// True when `a_Bj · a_jW = a_BW` for every criterion.
    pub fn is_fully_consistent(&self) -> bool {
        let a_bw = u32::from(self.best_to_worst());
        self.best_to_others
            .iter()
            .zip(&self.others_to_worst)
            .all(|(&b, &w)| u32::from(b) * u32::from(w) == a_bw)
    }

    /// Largest absolute deviation `max_j {|w_B − a_Bj w_j|, |w_j − a_jW w_W|}`.
    pub fn max_deviation(&self, weights: &[f64]) -> f64 {
        let wb = weights[self.best];
        let ww = weights[self.worst];
        weights
            .iter()
            .enumerate()
            .map(|(j, &wj)| {
                let to_best = (wb - f64::from(self.best_to_others[j]) * wj).abs();
                let to_worst = (wj - f64::from(self.others_to_worst[j]) * ww).abs();
                to_best.max(to_worst)
            })
            .fold(0.0, f64::max)
    }

    /// The minimax model as a linear program over `(w_1, …, w_n, ξ)`.
    pub fn to_linear_program(&self) -> LinearProgram {
        let n = self.len();
        let mut objective = vec![0.0; n + 1];
        objective[n] = 1.0;
        let mut lp = LinearProgram::new(objective);
        let push_abs = |lp: &mut LinearProgram, coeffs: Vec<f64>| {
            // |coeffs·w| ≤ ξ as coeffs·w − ξ ≤ 0 and −coeffs·w − ξ ≤ 0
            let mut pos = coeffs.clone();
            pos.push(-1.0);
            let mut neg: Vec<f64> = coeffs.iter().map(|c| -c).collect();
            neg.push(-1.0);
            lp.add_constraint(pos, Sense::Le, 0.0)
                .and_then(|lp| lp.add_constraint(neg, Sense::Le, 0.0))
                .expect("row width matches objective");
        };
        for j in 0..n {
            if j != self.best {
                let mut row = vec![0.0; n];
                row[self.best] += 1.0;
                row[j] -= f64::from(self.best_to_others[j]);
                push_abs(&mut lp, row);
            }
            // the j = B row repeats the j = W best-to-others row
            if j != self.worst && j != self.best {
                let mut row = vec![0.0; n];
                row[j] += 1.0;
                row[self.worst] -= f64::from(self.others_to_worst[j]);
                push_abs(&mut lp, row);
            }
        }
        let mut sum = vec![1.0; n];
        sum.push(0.0);
        lp.add_constraint(sum, Sense::Eq, 1.0)
            .expect("row width matches objective");
        lp
    }
}

/// Resolves a document's labels into a validated instance.
pub fn validate_instance(raw: &BwmDocument) -> Result<BwmInstance, BwmError> {
    let resolve = |r: &CriterionRef| -> Result<usize, BwmError> {
        match r {
            CriterionRef::Index(i) => Ok(*i),
            CriterionRef::Label(label) => raw
                .criteria
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| BwmError::UnknownCriterion(label.clone())),
        }
    };
    if let Some(labels) = &raw.labels {
        if labels.len() != raw.criteria.len() {
            return Err(BwmError::Shape(format!(
                "{} labels for {} criteria",
                labels.len(),
                raw.criteria.len()
            )));
        }
    }
    BwmInstance::new(
        raw.criteria.clone(),
        resolve(&raw.best)?,
        resolve(&raw.worst)?,
        raw.best_to_others.clone(),
        raw.others_to_worst.clone(),
    )
}

/// Optimal weights and `ξ*` for one decision-maker.
pub fn solve_weights(inst: &BwmInstance) -> Result<BwmSolution, BwmError> {
    let n = inst.len();
    let lp = inst.to_linear_program();
    let sol = lp_minimize(&lp)?;
    let mut weights: Vec<f64> = sol.values[..n].iter().map(|w| w.max(0.0)).collect();
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(BwmError::Domain(format!("solver returned weights summing to {sum}")));
    }
    weights.iter_mut().for_each(|w| *w /= sum);
    let xi_star = sol.objective.max(0.0);
    Ok(BwmSolution {
        weights: WeightVector::new(weights, xi_star)?,
        multiple_optima: sol.alternative_optima,
    })
}

/// Consistency index per best-to-worst rating 1..=9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyIndexTable(pub [f64; 9]);

impl Default for ConsistencyIndexTable {
    fn default() -> Self {
        Self([0.00, 0.44, 1.00, 1.63, 2.30, 3.00, 3.73, 4.47, 5.23])
    }
}

impl ConsistencyIndexTable {
    pub fn index(&self, best_to_worst: u8) -> Option<f64> {
        (1..=9)
            .contains(&best_to_worst)
            .then(|| self.0[usize::from(best_to_worst) - 1])
    }
}

/// `ξ* / CI(a_BW)`, zero for perfectly consistent judgments.
pub fn consistency_ratio(
    xi_star: f64,
    best_to_worst: u8,
    table: &ConsistencyIndexTable,
) -> Result<f64, BwmError> {
    if !(xi_star.is_finite() && xi_star >= 0.0) {
        return Err(BwmError::Domain(format!("ξ* = {xi_star}")));
    }
    let ci = table.index(best_to_worst).ok_or(BwmError::Scale {
        vector: "best_to_worst",
        index: 0,
        value: i64::from(best_to_worst),
    })?;
    if xi_star == 0.0 {
        return Ok(0.0);
    }
    if ci <= 0.0 {
        return Err(BwmError::InconsistencyImpossible { xi_star });
    }
    Ok(xi_star / ci)
}
