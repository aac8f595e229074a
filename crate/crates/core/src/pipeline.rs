//! Split, scale, optionally augment, then train and score every model.

use ndarray::{concatenate, s, Array1, Array2, Axis};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fire::{
    feature_names, CalendarEncoding, DataError, FireDataset, Scaler, ScalerKind, SplitConfig, TargetTransform,
};
use crate::models::{self, FeatureImportance, Metrics, ModelError, ModelSpec};
use crate::rng::stable_mean;
use crate::tabgan::{self, GanConfig, GanError, Generator};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Gan(#[from] GanError),
    #[error("no models requested")]
    NoModels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub split: SplitConfig,
    pub encoding: CalendarEncoding,
    pub target: TargetTransform,
    pub scaler: ScalerKind,
    pub with_gan: bool,
    pub gan: GanConfig,
    /// Synthetic rows to add; `None` restores the full dataset size.
    pub synthetic_rows: Option<usize>,
    pub models: Vec<ModelSpec>,
}

impl PipelineConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            split: SplitConfig {
                seed,
                ..SplitConfig::default()
            },
            encoding: CalendarEncoding::default(),
            target: TargetTransform::default(),
            scaler: ScalerKind::default(),
            with_gan: false,
            gan: GanConfig {
                seed,
                ..GanConfig::default()
            },
            synthetic_rows: None,
            models: models::default_lineup(seed),
        }
    }
}

/// A feature matrix and its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelRow {
    pub model: String,
    pub kind: String,
    pub augmented: bool,
    pub test: Metrics,
    /// Error on the rows the model was fitted on.
    pub train_rmse: f64,
    /// Mean predictor's error on those same rows.
    pub train_baseline_rmse: f64,
    pub beats_baseline: bool,
    pub iterations: usize,
    pub final_training_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Baseline {
    pub train_mean: f64,
    pub test: Metrics,
    pub train_rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GanSummary {
    pub real_rows: usize,
    pub synthetic_rows: usize,
    pub epochs: usize,
    pub final_d_objective: Option<f64>,
    pub final_g_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub train_rows: usize,
    pub test_rows: usize,
    pub target: TargetTransform,
    pub baseline: Baseline,
    pub rows: Vec<ModelRow>,
    pub gan: Option<GanSummary>,
    pub importance: Option<FeatureImportance>,
}

fn in_sample_baseline(y: &Array1<f64>) -> f64 {
    let mean = stable_mean(y.iter().copied());
    (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / y.len() as f64).sqrt()
}

fn score(spec: &ModelSpec, train: &Table, test: &Table, augmented: bool) -> Result<ModelRow, ModelError> {
    let model = models::train(spec, &train.x, &train.y)?;
    let fitted = model.predict(&train.x)?;
    let train_rmse = models::rmse(train.y.as_slice().unwrap_or(&train.y.to_vec()), &fitted.to_vec())?;
    let pred = model.predict(&test.x)?;
    let test_metrics = Metrics::compute(&test.y.to_vec(), &pred.to_vec())?;
    let train_baseline_rmse = in_sample_baseline(&train.y);
    Ok(ModelRow {
        model: spec.label(),
        kind: spec.model.name().to_string(),
        augmented,
        test: test_metrics,
        train_rmse,
        train_baseline_rmse,
        beats_baseline: train_rmse <= train_baseline_rmse,
        iterations: model.meta.iterations,
        final_training_loss: model.meta.final_training_loss,
    })
}

/// Trains and scores every spec on `train`, and again on `augmented` when
/// given. Models train in parallel; each draws only from its own seed.
pub fn benchmark(
    specs: &[ModelSpec],
    train: &Table,
    test: &Table,
    augmented: Option<&Table>,
) -> Result<ModelReport, PipelineError> {
    if specs.is_empty() {
        return Err(PipelineError::NoModels);
    }
    let mut jobs: Vec<(&ModelSpec, &Table, bool)> = Vec::new();
    if let Some(aug) = augmented {
        jobs.extend(specs.iter().map(|s| (s, aug, true)));
    }
    jobs.extend(specs.iter().map(|s| (s, train, false)));
    let rows = jobs
        .par_iter()
        .map(|(spec, data, aug)| score(spec, data, test, *aug))
        .collect::<Result<Vec<_>, _>>()?;

    let train_mean = stable_mean(train.y.iter().copied());
    let constant = vec![train_mean; test.y.len()];
    let baseline = Baseline {
        train_mean,
        test: Metrics::compute(&test.y.to_vec(), &constant)?,
        train_rmse: in_sample_baseline(&train.y),
    };
    Ok(ModelReport {
        train_rows: train.y.len(),
        test_rows: test.y.len(),
        target: TargetTransform::Raw,
        baseline,
        rows,
        gan: None,
        importance: None,
    })
}

/// Everything a prediction run produces.
#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub report: ModelReport,
    pub generator: Option<Generator>,
    /// Synthetic rows in original units, target last.
    pub synthetic: Option<Array2<f64>>,
}

/// Min-max scales `[features | target]` of the real training rows, trains
/// the generator there, and returns the synthetic rows mapped back to
/// original units.
pub fn synthesize(
    train_x: &Array2<f64>,
    train_y: &Array1<f64>,
    gan: &GanConfig,
    rows: usize,
) -> Result<(Generator, Array2<f64>), PipelineError> {
    let joint = concatenate![Axis(1), train_x.view(), train_y.view().insert_axis(Axis(1))];
    let mut scaler = Scaler::new(ScalerKind::MinMax);
    scaler.fit(&joint)?;
    let scaled = scaler.transform(&joint)?;
    let generator = tabgan::train_gan(&scaled, gan)?;
    let synthetic = tabgan::sample(&generator, rows, gan.seed.wrapping_add(1));
    Ok((generator, scaler.inverse_transform(&synthetic)?))
}

pub fn run(data: &FireDataset, cfg: &PipelineConfig) -> Result<PipelineOutcome, PipelineError> {
    if cfg.models.is_empty() {
        return Err(PipelineError::NoModels);
    }
    let (train, test) = data.split(&cfg.split)?;
    let raw_x = train.feature_matrix(cfg.encoding);
    let y = train.targets(cfg.target);
    let mut scaler = Scaler::new(cfg.scaler);
    scaler.fit(&raw_x)?;
    let train_t = Table {
        x: scaler.transform(&raw_x)?,
        y,
    };
    let test_t = Table {
        x: scaler.transform(&test.feature_matrix(cfg.encoding))?,
        y: test.targets(cfg.target),
    };

    let (generator, synthetic, augmented) = if cfg.with_gan {
        let n_syn = cfg.synthetic_rows.unwrap_or(test.len());
        let (g, syn) = synthesize(&raw_x, &train_t.y, &cfg.gan, n_syn)?;
        let width = raw_x.ncols();
        let syn_x = scaler.transform(&syn.slice(s![.., ..width]).to_owned())?;
        let aug = Table {
            x: concatenate![Axis(0), train_t.x.view(), syn_x.view()],
            y: concatenate![Axis(0), train_t.y.view(), syn.column(width)],
        };
        (Some(g), Some(syn), Some(aug))
    } else {
        (None, None, None)
    };

    let mut report = benchmark(&cfg.models, &train_t, &test_t, augmented.as_ref())?;
    report.target = cfg.target;
    report.gan = generator.as_ref().map(|g| GanSummary {
        real_rows: train_t.y.len(),
        synthetic_rows: synthetic.as_ref().map_or(0, |m| m.nrows()),
        epochs: g.loss_history.len(),
        final_d_objective: g.loss_history.last().map(|r| r.d_objective),
        final_g_objective: g.loss_history.last().map(|r| r.g_objective),
    });

    let forest = cfg
        .models
        .iter()
        .find(|m| matches!(m.model, models::ModelKind::RandomForest(_)))
        .cloned()
        .unwrap_or_else(|| {
            ModelSpec::new(
                models::ModelKind::RandomForest(models::ForestConfig::default()),
                cfg.split.seed,
            )
        });
    let rf = models::train(&forest, &train_t.x, &train_t.y)?;
    report.importance = Some(models::feature_importance(&rf, &feature_names(cfg.encoding))?);

    Ok(PipelineOutcome {
        report,
        generator,
        synthetic,
    })
}

impl ModelReport {
    /// Model × {with, without augmentation} × {RMSE, MAE}, then in-sample
    /// errors and the importance ranking.
    pub fn to_text(&self) -> String {
        use crate::report::{fixed_width_table, fmt3};
        let mut labels: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !labels.contains(&r.model.as_str()) {
                labels.push(&r.model);
            }
        }
        let cell = |label: &str, aug: bool, f: fn(&ModelRow) -> f64| {
            self.rows
                .iter()
                .find(|r| r.model == label && r.augmented == aug)
                .map_or_else(|| "-".to_string(), |r| format!("{:.4}", f(r)))
        };
        let mut rows: Vec<Vec<String>> = labels
            .iter()
            .map(|l| {
                vec![
                    l.to_string(),
                    cell(l, true, |r| r.test.rmse),
                    cell(l, true, |r| r.test.mae),
                    cell(l, false, |r| r.test.rmse),
                    cell(l, false, |r| r.test.mae),
                ]
            })
            .collect();
        rows.push(vec![
            "Mean baseline".into(),
            "-".into(),
            "-".into(),
            format!("{:.4}", self.baseline.test.rmse),
            format!("{:.4}", self.baseline.test.mae),
        ]);
        let mut out = format!(
            "Test-set errors ({} train rows, {} test rows, target {:?})\n",
            self.train_rows, self.test_rows, self.target
        );
        out.push_str(&fixed_width_table(
            &["Model", "With GAN RMSE", "With GAN MAE", "Without RMSE", "Without MAE"],
            &rows,
        ));

        out.push_str("\nIn-sample RMSE against the mean predictor\n");
        let fit_rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.model.clone(),
                    if r.augmented { "yes" } else { "no" }.into(),
                    format!("{:.4}", r.train_rmse),
                    format!("{:.4}", r.train_baseline_rmse),
                    if r.beats_baseline { "ok" } else { "WORSE" }.into(),
                ]
            })
            .collect();
        out.push_str(&fixed_width_table(
            &["Model", "Augmented", "Train RMSE", "Baseline", "Status"],
            &fit_rows,
        ));

        if let Some(g) = &self.gan {
            out.push_str(&format!(
                "\nGAN: {} real + {} synthetic rows, {} epochs\n",
                g.real_rows, g.synthetic_rows, g.epochs
            ));
        }
        if let Some(imp) = &self.importance {
            let mut order: Vec<usize> = (0..imp.features.len()).collect();
            order.sort_by(|&a, &b| imp.importance[b].total_cmp(&imp.importance[a]).then(a.cmp(&b)));
            let rows: Vec<Vec<String>> = order
                .iter()
                .map(|&i| vec![imp.features[i].clone(), fmt3(imp.importance[i])])
                .collect();
            out.push_str("\nRandom-forest feature importance");
            if imp.uniform_fallback {
                out.push_str(" (uniform fallback: no split reduced impurity)");
            }
            out.push('\n');
            out.push_str(&fixed_width_table(&["Feature", "Importance"], &rows));
        }
        out
    }
}
