//! Regression models for burned-area prediction.

mod forest;
mod gbt;
mod linear;
pub mod metrics;
pub mod mlp;
mod svr;
mod tree;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use forest::{ForestConfig, RandomForest};
pub use gbt::{GbtConfig, GradientBoosting};
pub use linear::LinearModel;
pub use metrics::{mae, rmse, Metrics};
pub use mlp::{MlpConfig, MlpRegressor};
pub use svr::{LinearSvr, SvrConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("data error: {0}")]
    Data(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("expected a {expected} model, got {found}")]
    Kind { expected: String, found: String },
    #[error("invalid hyperparameter: {0}")]
    Hyperparameter(String),
    #[error("training diverged: {0}")]
    Divergence(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    RandomForest(ForestConfig),
    Gbt(GbtConfig),
    LinearSvr(SvrConfig),
    NeuralNet(MlpConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: ModelKind,
    pub seed: u64,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::RandomForest(_) => "random_forest",
            Self::Gbt(_) => "gbt",
            Self::LinearSvr(_) => "linear_svr",
            Self::NeuralNet(_) => "neural_net",
        }
    }

    /// Parses a command-line token: `linear`, `rf`, `gbt`, `svr`, `nn` or
    /// `nn<epochs>`.
    pub fn from_token(token: &str) -> Result<Self, ModelError> {
        let t = token.trim().to_ascii_lowercase();
        Ok(match t.as_str() {
            "linear" | "lr" => Self::Linear,
            "rf" | "random_forest" | "forest" => Self::RandomForest(ForestConfig::default()),
            "gbt" | "xgb" | "boosting" => Self::Gbt(GbtConfig::default()),
            "svr" | "linear_svr" => Self::LinearSvr(SvrConfig::default()),
            "nn" | "neural_net" => Self::NeuralNet(MlpConfig::default()),
            other => match other.strip_prefix("nn").map(str::parse::<usize>) {
                Some(Ok(epochs)) => Self::NeuralNet(MlpConfig::with_epochs(epochs)),
                _ => return Err(ModelError::Hyperparameter(format!("unknown model '{token}'"))),
            },
        })
    }

    fn validate(&self) -> Result<(), ModelError> {
        let rate = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(ModelError::Hyperparameter(format!("{name} = {v} outside (0, 1]")))
            }
        };
        let count = |name: &str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                Err(ModelError::Hyperparameter(format!("{name} must be positive")))
            }
        };
        match self {
            Self::Linear => Ok(()),
            Self::RandomForest(c) => {
                count("n_trees", c.n_trees)?;
                count("min_samples_leaf", c.min_samples_leaf)
            }
            Self::Gbt(c) => {
                count("max_depth", c.max_depth)?;
                count("min_samples_leaf", c.min_samples_leaf)?;
                rate("learning_rate", c.learning_rate)
            }
            Self::LinearSvr(c) => {
                rate("learning_rate", c.learning_rate)?;
                if c.epsilon < 0.0 || c.l2_penalty < 0.0 {
                    return Err(ModelError::Hyperparameter("negative epsilon or penalty".into()));
                }
                Ok(())
            }
            Self::NeuralNet(c) => {
                rate("learning_rate", c.learning_rate)?;
                c.hidden.iter().try_for_each(|&h| count("hidden width", h))
            }
        }
    }
}

impl ModelSpec {
    pub fn new(model: ModelKind, seed: u64) -> Self {
        Self { model, seed }
    }

    /// Display name used in reports.
    pub fn label(&self) -> String {
        match &self.model {
            ModelKind::Linear => "Linear Regression".into(),
            ModelKind::RandomForest(_) => "Random Forest".into(),
            ModelKind::Gbt(_) => "Gradient Boosting".into(),
            ModelKind::LinearSvr(_) => "SVR".into(),
            ModelKind::NeuralNet(c) => format!("NN ({} epochs)", c.epochs),
        }
    }
}

/// The six-model lineup: two network lengths, linear, forest, boosting, SVR.
pub fn default_lineup(seed: u64) -> Vec<ModelSpec> {
    vec![
        ModelSpec::new(ModelKind::NeuralNet(MlpConfig::with_epochs(200)), seed),
        ModelSpec::new(ModelKind::NeuralNet(MlpConfig::with_epochs(100)), seed),
        ModelSpec::new(ModelKind::Linear, seed),
        ModelSpec::new(ModelKind::RandomForest(ForestConfig::default()), seed),
        ModelSpec::new(ModelKind::Gbt(GbtConfig::default()), seed),
        ModelSpec::new(ModelKind::LinearSvr(SvrConfig::default()), seed),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedModel {
    Linear(LinearModel),
    RandomForest(RandomForest),
    Gbt(GradientBoosting),
    LinearSvr(LinearSvr),
    NeuralNet(MlpRegressor),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    /// Epochs, trees or boosting rounds.
    pub iterations: usize,
    pub final_training_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub fitted: FittedModel,
    pub meta: TrainingMeta,
    n_features: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub features: Vec<String>,
    pub importance: Vec<f64>,
    /// No split reduced impurity; the importances are the uniform fallback.
    pub uniform_fallback: bool,
}

fn check_training_data(x: &Array2<f64>, y: &Array1<f64>) -> Result<(), ModelError> {
    if x.ncols() == 0 {
        return Err(ModelError::Shape("no features".into()));
    }
    if x.nrows() != y.len() {
        return Err(ModelError::Shape(format!("{} rows but {} targets", x.nrows(), y.len())));
    }
    if y.len() < 2 {
        return Err(ModelError::Data(format!("need at least 2 samples, got {}", y.len())));
    }
    if let Some(((i, j), v)) = x.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(ModelError::Data(format!("feature [{i}, {j}] is {v}")));
    }
    if let Some((i, v)) = y.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(ModelError::Data(format!("target {i} is {v}")));
    }
    Ok(())
}

fn training_mse(pred: &Array1<f64>, y: &Array1<f64>) -> f64 {
    pred.iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / y.len() as f64
}

pub fn train(spec: &ModelSpec, x: &Array2<f64>, y: &Array1<f64>) -> Result<TrainedModel, ModelError> {
    spec.model.validate()?;
    check_training_data(x, y)?;
    let view = x.view();
    let (fitted, iterations) = match &spec.model {
        ModelKind::Linear => (FittedModel::Linear(LinearModel::fit(view, y)), 1),
        ModelKind::RandomForest(c) => (
            FittedModel::RandomForest(RandomForest::fit(view, y, c, spec.seed)),
            c.n_trees,
        ),
        ModelKind::Gbt(c) => (FittedModel::Gbt(GradientBoosting::fit(view, y, c)), c.n_rounds),
        ModelKind::LinearSvr(c) => (FittedModel::LinearSvr(LinearSvr::fit(view, y, c)), c.epochs),
        ModelKind::NeuralNet(c) => (
            FittedModel::NeuralNet(MlpRegressor::fit(view, y, c, spec.seed)),
            c.epochs,
        ),
    };
    let mut model = TrainedModel {
        spec: spec.clone(),
        fitted,
        meta: TrainingMeta {
            iterations,
            final_training_loss: 0.0,
        },
        n_features: x.ncols(),
    };
    let pred = model.predict(x)?;
    let loss = training_mse(&pred, y);
    if !loss.is_finite() {
        return Err(ModelError::Divergence(format!("{} training loss is {loss}", spec.label())));
    }
    model.meta.final_training_loss = loss;
    Ok(model)
}

impl TrainedModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict(&self, x: &Array2<f64>) -> Result<Array1<f64>, ModelError> {
        predict(self, x)
    }
}

pub fn predict(model: &TrainedModel, x: &Array2<f64>) -> Result<Array1<f64>, ModelError> {
    if x.ncols() != model.n_features {
        return Err(ModelError::Shape(format!(
            "model trained on {} features, got {}",
            model.n_features,
            x.ncols()
        )));
    }
    if x.nrows() == 0 {
        return Ok(Array1::zeros(0));
    }
    let view = x.view();
    Ok(match &model.fitted {
        FittedModel::Linear(m) => m.predict(view),
        FittedModel::RandomForest(m) => m.predict(view),
        FittedModel::Gbt(m) => m.predict(view),
        FittedModel::LinearSvr(m) => m.predict(view),
        FittedModel::NeuralNet(m) => m.predict(view),
    })
}

/// Mean impurity decrease of a random forest, normalized to sum to one.
pub fn feature_importance(model: &TrainedModel, names: &[String]) -> Result<FeatureImportance, ModelError> {
    let FittedModel::RandomForest(forest) = &model.fitted else {
        return Err(ModelError::Kind {
            expected: "random_forest".into(),
            found: model.spec.model.name().into(),
        });
    };
    if names.len() != model.n_features {
        return Err(ModelError::Shape(format!(
            "{} feature names for {} features",
            names.len(),
            model.n_features
        )));
    }
    let raw = forest.raw_importance();
    let total: f64 = raw.iter().sum();
    let (importance, uniform_fallback) = if total > 0.0 {
        (raw.iter().map(|v| v / total).collect(), false)
    } else {
        (vec![1.0 / raw.len() as f64; raw.len()], true)
    };
    Ok(FeatureImportance {
        features: names.to_vec(),
        importance,
        uniform_fallback,
    })
}
