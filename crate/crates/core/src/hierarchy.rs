//! Group aggregation and two-level weight composition.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bwm::{BwmError, WeightVector};
use crate::tolerances::WEIGHT_SUM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMethod {
    #[default]
    ArithmeticMean,
    GeometricMean,
}

impl std::str::FromStr for AggregationMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "arithmetic" | "arithmetic-mean" | "mean" => Ok(Self::ArithmeticMean),
            "geometric" | "geometric-mean" => Ok(Self::GeometricMean),
            other => Err(format!("unknown aggregation method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupWeightSet {
    pub per_dm: Vec<WeightVector>,
    pub aggregate: WeightVector,
    pub method: AggregationMethod,
}

/// Weights with the criterion codes (and optional names) they belong to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledWeights {
    pub codes: Vec<String>,
    pub labels: Vec<String>,
    pub weights: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionNode {
    pub label: String,
    pub code: String,
    pub weight: f64,
    pub rank: usize,
    pub children: Vec<AttributeNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeNode {
    pub label: String,
    pub code: String,
    pub local_weight: f64,
    pub global_weight: f64,
    pub local_rank: usize,
    pub global_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub dimensions: Vec<DimensionNode>,
}

/// Pools per-decision-maker weights over identical criteria. The pooled `ξ*`
/// is the largest individual one.
pub fn aggregate_weights(
    vectors: &[WeightVector],
    method: AggregationMethod,
) -> Result<WeightVector, BwmError> {
    let first = vectors
        .first()
        .ok_or_else(|| BwmError::Shape("no weight vectors to aggregate".into()))?;
    let n = first.len();
    for (k, v) in vectors.iter().enumerate() {
        if v.len() != n {
            return Err(BwmError::Shape(format!(
                "vector {k} has {} weights, expected {n}",
                v.len()
            )));
        }
        if let Some(w) = v.weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(BwmError::Domain(format!("vector {k} has weight {w}")));
        }
    }
    let m = vectors.len() as f64;
    let pooled: Vec<f64> = match method {
        AggregationMethod::ArithmeticMean => (0..n)
            .map(|j| {
                let base = first.weights[j];
                base + vectors.iter().map(|v| v.weights[j] - base).sum::<f64>() / m
            })
            .collect(),
        AggregationMethod::GeometricMean => {
            let raw: Vec<f64> = (0..n)
                .map(|j| {
                    if vectors.iter().any(|v| v.weights[j] == 0.0) {
                        0.0
                    } else {
                        (vectors.iter().map(|v| v.weights[j].ln()).sum::<f64>() / m).exp()
                    }
                })
                .collect();
            let total: f64 = raw.iter().sum();
            if total <= 0.0 {
                return Err(BwmError::Domain(
                    "geometric mean is zero for every criterion".into(),
                ));
            }
            raw.iter().map(|w| w / total).collect()
        }
    };
    let xi = vectors.iter().map(|v| v.xi_star).fold(0.0, f64::max);
    WeightVector::new(pooled, xi)
}

/// Ranks by descending weight; equal weights keep input order.
pub fn rank(weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    let mut ranks = vec![0; weights.len()];
    for (position, idx) in order.into_iter().enumerate() {
        ranks[idx] = position + 1;
    }
    ranks
}

fn check_simplex(name: &str, w: &WeightVector) -> Result<(), BwmError> {
    let sum: f64 = w.weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM {
        return Err(BwmError::Domain(format!("{name} weights sum to {sum}")));
    }
    Ok(())
}

/// Multiplies each dimension weight through its attributes' local weights.
pub fn compute_global_weights(
    dimensions: &LabeledWeights,
    locals: &[LabeledWeights],
) -> Result<Hierarchy, BwmError> {
    if dimensions.codes.len() != dimensions.weights.len() {
        return Err(BwmError::Shape("dimension codes and weights differ in length".into()));
    }
    if locals.len() != dimensions.weights.len() {
        return Err(BwmError::Shape(format!(
            "{} dimensions but {} local weight sets",
            dimensions.weights.len(),
            locals.len()
        )));
    }
    check_simplex("dimension", &dimensions.weights)?;
    for (code, local) in dimensions.codes.iter().zip(locals) {
        if local.codes.len() != local.weights.len() {
            return Err(BwmError::Shape(format!(
                "dimension {code}: attribute codes and weights differ in length"
            )));
        }
        check_simplex(&format!("dimension {code} local"), &local.weights)?;
    }

    let dim_ranks = rank(&dimensions.weights.weights);
    let globals: Vec<f64> = dimensions
        .weights
        .weights
        .iter()
        .zip(locals)
        .flat_map(|(dw, local)| local.weights.weights.iter().map(move |lw| dw * lw))
        .collect();
    let global_ranks = rank(&globals);

    let mut offset = 0;
    let mut nodes = Vec::with_capacity(locals.len());
    for (d, local) in locals.iter().enumerate() {
        let local_ranks = rank(&local.weights.weights);
        let children = (0..local.codes.len())
            .map(|a| AttributeNode {
                label: local.labels.get(a).cloned().unwrap_or_else(|| local.codes[a].clone()),
                code: local.codes[a].clone(),
                local_weight: local.weights.weights[a],
                global_weight: globals[offset + a],
                local_rank: local_ranks[a],
                global_rank: global_ranks[offset + a],
            })
            .collect();
        offset += local.codes.len();
        nodes.push(DimensionNode {
            label: dimensions
                .labels
                .get(d)
                .cloned()
                .unwrap_or_else(|| dimensions.codes[d].clone()),
            code: dimensions.codes[d].clone(),
            weight: dimensions.weights.weights[d],
            rank: dim_ranks[d],
            children,
        });
    }
    Ok(Hierarchy { dimensions: nodes })
}

impl Hierarchy {
    pub fn global_weights(&self) -> Vec<f64> {
        self.dimensions
            .iter()
            .flat_map(|d| d.children.iter().map(|c| c.global_weight))
            .collect()
    }

    /// Table with one line per attribute, weights at three decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<28} {:>7} {:>7}  {:<10} {:>12} {:>13} {:>13} {:>14}",
            "Dimension",
            "Weight",
            "Ranking",
            "Attribute",
            "Local weight",
            "Local Ranking",
            "Global weight",
            "Global Ranking"
        );
        for d in &self.dimensions {
            for (i, c) in d.children.iter().enumerate() {
                let (name, weight, rank) = if i == 0 {
                    (
                        format!("{} ({})", d.label, d.code),
                        format!("{:.3}", d.weight),
                        d.rank.to_string(),
                    )
                } else {
                    (String::new(), String::new(), String::new())
                };
                let _ = writeln!(
                    out,
                    "{:<28} {:>7} {:>7}  {:<10} {:>12.3} {:>13} {:>13.3} {:>14}",
                    name, weight, rank, c.code, c.local_weight, c.local_rank, c.global_weight, c.global_rank
                );
            }
        }
        out
    }
}
