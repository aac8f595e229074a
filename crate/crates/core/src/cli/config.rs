//! Run configuration: file values, then environment, then flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::cvi::DEFAULT_AGREEMENT_PROPORTION;
use crate::fire::{CalendarEncoding, ScalerKind, SplitConfig, TargetTransform};
use crate::hierarchy::AggregationMethod;
use crate::models::{self, ModelKind, ModelSpec};
use crate::pipeline::PipelineConfig;
use crate::rng::DEFAULT_SEED;
use crate::tabgan::GanConfig;

pub const DEFAULT_OUTPUT_DIR: &str = "reports";
pub const OUTPUT_ENV: &str = "WEATHERWISE_OUT";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub validate: Option<ValidateSection>,
    pub bwm: Option<BwmSection>,
    pub hierarchy: Option<HierarchySection>,
    pub synth: Option<SynthSection>,
    pub predict: Option<PredictSection>,
    #[serde(default)]
    pub gan: GanSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateSection {
    pub survey: PathBuf,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BwmSection {
    pub dir: PathBuf,
    pub aggregate: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HierarchySection {
    pub dims: PathBuf,
    pub locals: PathBuf,
    pub aggregate: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub train: Option<PathBuf>,
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictSection {
    pub data: Option<PathBuf>,
    pub with_gan: Option<bool>,
    pub models: Option<Vec<String>>,
    pub test_fraction: Option<f64>,
    pub synthetic_rows: Option<usize>,
    pub log_target: Option<bool>,
    pub one_hot: Option<bool>,
    pub zscore: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GanSection {
    pub epochs: Option<usize>,
    pub batch_size: Option<usize>,
    pub learning_rate: Option<f64>,
    pub noise_dim: Option<usize>,
    pub hidden: Option<usize>,
}

impl GanSection {
    pub fn apply(&self, seed: u64) -> GanConfig {
        let d = GanConfig::default();
        GanConfig {
            noise_dim: self.noise_dim.unwrap_or(d.noise_dim),
            generator_hidden: self.hidden.unwrap_or(d.generator_hidden),
            discriminator_hidden: self.hidden.unwrap_or(d.discriminator_hidden),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            epochs: self.epochs.unwrap_or(d.epochs),
            batch_size: self.batch_size.unwrap_or(d.batch_size),
            seed,
            ..d
        }
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.rebase(base);
        Ok(cfg)
    }

    /// Makes relative paths relative to the config file's directory.
    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.output_dir.as_mut() {
            fix(p);
        }
        if let Some(v) = self.validate.as_mut() {
            fix(&mut v.survey);
        }
        if let Some(b) = self.bwm.as_mut() {
            fix(&mut b.dir);
        }
        if let Some(h) = self.hierarchy.as_mut() {
            fix(&mut h.dims);
            fix(&mut h.locals);
        }
        if let Some(p) = self.synth.as_mut().and_then(|s| s.train.as_mut()) {
            fix(p);
        }
        if let Some(p) = self.predict.as_mut().and_then(|s| s.data.as_mut()) {
            fix(p);
        }
    }
}

/// Parameters that enter a stage's report hash. Paths are left out so the
/// same inputs at a different location give the same report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateParams {
    pub threshold_proportion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateParams {
    pub aggregate: AggregationMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthParams {
    pub rows: Option<usize>,
    pub gan: GanConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateStage {
    pub survey: PathBuf,
    pub params: ValidateParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BwmStage {
    pub dir: PathBuf,
    pub params: AggregateParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyStage {
    pub dims: PathBuf,
    pub locals: PathBuf,
    pub params: AggregateParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthStage {
    pub train: PathBuf,
    pub params: SynthParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictStage {
    pub data: PathBuf,
    pub params: PipelineConfig,
}

/// Fully resolved run: output location, seed and the stages to execute, in
/// the order validate, bwm, hierarchy, synth, predict.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub seed: u64,
    pub validate: Option<ValidateStage>,
    pub bwm: Option<BwmStage>,
    pub hierarchy: Option<HierarchyStage>,
    pub synth: Option<SynthStage>,
    pub predict: Option<PredictStage>,
}

impl RunConfig {
    pub fn new(output_dir: PathBuf, seed: u64) -> Self {
        Self {
            output_dir,
            seed,
            validate: None,
            bwm: None,
            hierarchy: None,
            synth: None,
            predict: None,
        }
    }

    /// Every referenced input must exist before any stage runs.
    pub fn check_paths(&self) -> Result<(), CliError> {
        let mut paths: Vec<&Path> = Vec::new();
        if let Some(s) = &self.validate {
            paths.push(&s.survey);
        }
        if let Some(s) = &self.bwm {
            paths.push(&s.dir);
        }
        if let Some(s) = &self.hierarchy {
            paths.push(&s.dims);
            paths.push(&s.locals);
        }
        if let Some(s) = &self.synth {
            paths.push(&s.train);
        }
        if let Some(s) = &self.predict {
            paths.push(&s.data);
        }
        match paths.into_iter().find(|p| !p.exists()) {
            Some(p) => Err(CliError::Input(format!("{}: no such file or directory", p.display()))),
            None => Ok(()),
        }
    }
}

pub fn resolve_output_dir(flag_or_env: Option<PathBuf>, file: Option<&FileConfig>) -> PathBuf {
    flag_or_env
        .or_else(|| file.and_then(|f| f.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
}

pub fn resolve_seed(flag: Option<u64>, file: Option<&FileConfig>) -> u64 {
    flag.or_else(|| file.and_then(|f| f.seed)).unwrap_or(DEFAULT_SEED)
}

pub fn validate_params(threshold: Option<f64>) -> ValidateParams {
    ValidateParams {
        threshold_proportion: threshold.unwrap_or(DEFAULT_AGREEMENT_PROPORTION),
    }
}

pub fn parse_aggregate(value: Option<&str>) -> Result<AggregationMethod, CliError> {
    value.map_or(Ok(AggregationMethod::default()), |v| {
        v.parse().map_err(|e: String| CliError::Input(format!("aggregate: {e}")))
    })
}

pub fn parse_models(tokens: &[String], seed: u64) -> Result<Vec<ModelSpec>, CliError> {
    if tokens.is_empty() {
        return Err(CliError::Input("empty model list".into()));
    }
    tokens
        .iter()
        .map(|t| {
            ModelKind::from_token(t.trim())
                .map(|k| ModelSpec::new(k, seed))
                .map_err(|e| CliError::Input(format!("--models: {e}")))
        })
        .collect()
}

/// Prediction settings layered over the defaults.
#[derive(Debug, Clone, Default)]
pub struct PredictOverrides {
    pub with_gan: Option<bool>,
    pub models: Option<Vec<String>>,
    pub test_fraction: Option<f64>,
    pub synthetic_rows: Option<usize>,
    pub log_target: Option<bool>,
    pub one_hot: Option<bool>,
    pub zscore: Option<bool>,
}

impl PredictOverrides {
    pub fn from_section(s: &PredictSection) -> Self {
        Self {
            with_gan: s.with_gan,
            models: s.models.clone(),
            test_fraction: s.test_fraction,
            synthetic_rows: s.synthetic_rows,
            log_target: s.log_target,
            one_hot: s.one_hot,
            zscore: s.zscore,
        }
    }

    pub fn build(&self, seed: u64, gan: GanConfig) -> Result<PipelineConfig, CliError> {
        let models = match &self.models {
            Some(tokens) => parse_models(tokens, seed)?,
            None => models::default_lineup(seed),
        };
        let test_fraction = self
            .test_fraction
            .unwrap_or(SplitConfig::default().test_fraction);
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(CliError::Input(format!(
                "test fraction {test_fraction} must lie strictly between 0 and 1"
            )));
        }
        Ok(PipelineConfig {
            split: SplitConfig { test_fraction, seed },
            encoding: if self.one_hot.unwrap_or(false) {
                CalendarEncoding::OneHot
            } else {
                CalendarEncoding::Ordinal
            },
            target: if self.log_target.unwrap_or(false) {
                TargetTransform::Log1p
            } else {
                TargetTransform::Raw
            },
            scaler: if self.zscore.unwrap_or(false) {
                ScalerKind::ZScore
            } else {
                ScalerKind::MinMax
            },
            with_gan: self.with_gan.unwrap_or(false),
            gan,
            synthetic_rows: self.synthetic_rows,
            models,
        })
    }
}
