//! Batch command-line front end.
//!
//! Exit status is 0 on success, 1 for input or validation errors and 2 for
//! numerical failures. Reports are staged in memory and written only when
//! every requested stage succeeds.

pub mod config;
pub mod stages;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bwm::BwmError;
use crate::lp::LpError;
use crate::models::ModelError;
use crate::pipeline::PipelineError;
use crate::report::OutputSet;
use crate::tabgan::{GanConfig, GanError};
use config::{
    parse_aggregate, resolve_output_dir, resolve_seed, validate_params, BwmStage, FileConfig, GanSection,
    HierarchyStage, PredictOverrides, PredictStage, RunConfig, SynthStage, ValidateStage, OUTPUT_ENV,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn internal(e: impl std::fmt::Display) -> Self {
        Self::Numerical(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) | Self::Io { .. } => 1,
            Self::Numerical(_) => 2,
        }
    }

    pub fn from_bwm(path: &Path, e: BwmError) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e {
            BwmError::Solver(LpError::NonFinite | LpError::Dimension { .. } | LpError::VariableIndex { .. }) => {
                Self::Input(msg)
            }
            BwmError::Solver(_) => Self::Numerical(msg),
            _ => Self::Input(msg),
        }
    }

    pub fn from_gan(path: &Path, e: GanError) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e {
            GanError::Divergence { .. } | GanError::Shape(_) => Self::Numerical(msg),
            _ => Self::Input(msg),
        }
    }

    pub fn from_pipeline(path: &Path, e: PipelineError) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e {
            PipelineError::Gan(g) => Self::from_gan(path, g),
            PipelineError::Model(ModelError::Divergence(_) | ModelError::Shape(_) | ModelError::Kind { .. }) => {
                Self::Numerical(msg)
            }
            _ => Self::Input(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "weatherwise", version, about = "Expert-survey validation, Best-Worst weighting and burned-area prediction")]
pub struct Cli {
    /// Directory receiving the reports.
    #[arg(long, global = true, env = OUTPUT_ENV)]
    pub out: Option<PathBuf>,
    /// Master seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Content-validity indices of an expert rating survey.
    Validate {
        #[arg(long)]
        survey: PathBuf,
        /// Required agreement proportion.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Best-Worst weights for every decision-maker file in a directory.
    Bwm {
        #[arg(long)]
        dir: PathBuf,
        /// arithmetic or geometric
        #[arg(long)]
        aggregate: Option<String>,
    },
    /// Dimension and attribute weights composed into global weights.
    Hierarchy {
        /// Dimension comparisons: one file or a directory of files.
        #[arg(long)]
        dims: PathBuf,
        /// Directory with one entry per dimension code.
        #[arg(long)]
        locals: PathBuf,
        #[arg(long)]
        aggregate: Option<String>,
    },
    /// Train the generator and write synthetic rows.
    Synth {
        #[arg(long)]
        train: PathBuf,
        /// Synthetic rows to draw; defaults to the input row count.
        #[arg(long)]
        rows: Option<usize>,
        #[command(flatten)]
        gan: GanArgs,
    },
    /// Train and score the regressors on the fire table.
    Predict {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        opts: PredictArgs,
        #[command(flatten)]
        gan: GanArgs,
    },
    /// validate, bwm, hierarchy, synth and predict from one config file.
    All {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct GanArgs {
    #[arg(long)]
    pub gan_epochs: Option<usize>,
    #[arg(long)]
    pub gan_batch_size: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PredictArgs {
    /// Also train every model on GAN-augmented rows.
    #[arg(long)]
    pub with_gan: bool,
    /// Comma-separated: nn200, nn100, linear, rf, gbt, svr.
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<String>>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub synthetic_rows: Option<usize>,
    /// Model ln(1 + area) instead of area.
    #[arg(long)]
    pub log_target: bool,
    /// One-hot month and weekday.
    #[arg(long)]
    pub one_hot: bool,
    /// Standardize features instead of min-max scaling.
    #[arg(long)]
    pub zscore: bool,
}

impl GanArgs {
    fn section(&self) -> GanSection {
        GanSection {
            epochs: self.gan_epochs,
            batch_size: self.gan_batch_size,
            ..GanSection::default()
        }
    }
}

impl PredictArgs {
    fn overrides(&self) -> PredictOverrides {
        let flag = |b: bool| b.then_some(true);
        PredictOverrides {
            with_gan: flag(self.with_gan),
            models: self.models.clone(),
            test_fraction: self.test_fraction,
            synthetic_rows: self.synthetic_rows,
            log_target: flag(self.log_target),
            one_hot: flag(self.one_hot),
            zscore: flag(self.zscore),
        }
    }
}

fn gan_config(section: &GanSection, seed: u64) -> Result<GanConfig, CliError> {
    let cfg = section.apply(seed);
    if cfg.batch_size == 0 {
        return Err(CliError::Input("GAN batch size must be positive".into()));
    }
    Ok(cfg)
}

/// Resolves parsed arguments into a run. Flags win over the environment,
/// which wins over the config file, which wins over built-in defaults.
pub fn resolve(cli: Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.command {
        Command::All { config } => Some(FileConfig::load(config)?),
        _ => None,
    };
    let seed = resolve_seed(cli.seed, file.as_ref());
    let mut run = RunConfig::new(resolve_output_dir(cli.out, file.as_ref()), seed);
    match cli.command {
        Command::Validate { survey, threshold } => {
            run.validate = Some(ValidateStage {
                survey,
                params: validate_params(threshold),
            });
        }
        Command::Bwm { dir, aggregate } => {
            run.bwm = Some(BwmStage {
                dir,
                params: stages::aggregate_params(parse_aggregate(aggregate.as_deref())?),
            });
        }
        Command::Hierarchy { dims, locals, aggregate } => {
            run.hierarchy = Some(HierarchyStage {
                dims,
                locals,
                params: stages::aggregate_params(parse_aggregate(aggregate.as_deref())?),
            });
        }
        Command::Synth { train, rows, gan } => {
            run.synth = Some(SynthStage {
                train,
                params: stages::synth_params(rows, gan_config(&gan.section(), seed)?),
            });
        }
        Command::Predict { data, opts, gan } => {
            run.predict = Some(PredictStage {
                data,
                params: opts.overrides().build(seed, gan_config(&gan.section(), seed)?)?,
            });
        }
        Command::All { config } => {
            let file = file.expect("loaded above");
            let missing = |s: &str| CliError::Input(format!("{}: missing [{s}] section", config.display()));
            let v = file.validate.clone().ok_or_else(|| missing("validate"))?;
            let b = file.bwm.clone().ok_or_else(|| missing("bwm"))?;
            let h = file.hierarchy.clone().ok_or_else(|| missing("hierarchy"))?;
            let p = file.predict.clone().ok_or_else(|| missing("predict"))?;
            let data = p
                .data
                .clone()
                .ok_or_else(|| CliError::Input(format!("{}: [predict] needs data", config.display())))?;
            let s = file.synth.clone().unwrap_or_default();
            let gan = gan_config(&file.gan, seed)?;
            run.validate = Some(ValidateStage {
                survey: v.survey,
                params: validate_params(v.threshold),
            });
            run.bwm = Some(BwmStage {
                dir: b.dir,
                params: stages::aggregate_params(parse_aggregate(b.aggregate.as_deref())?),
            });
            run.hierarchy = Some(HierarchyStage {
                dims: h.dims,
                locals: h.locals,
                params: stages::aggregate_params(parse_aggregate(h.aggregate.as_deref())?),
            });
            run.synth = Some(SynthStage {
                train: s.train.unwrap_or_else(|| data.clone()),
                params: stages::synth_params(s.rows, gan.clone()),
            });
            run.predict = Some(PredictStage {
                data,
                params: PredictOverrides::from_section(&p).build(seed, gan)?,
            });
        }
    }
    Ok(run)
}

/// Executes the configured stages in order and promotes their reports.
pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.check_paths()?;
    let mut out = OutputSet::new();
    if let Some(s) = &cfg.validate {
        out.extend(stages::validate(s, cfg.seed)?);
    }
    if let Some(s) = &cfg.bwm {
        out.extend(stages::bwm(s, cfg.seed)?);
    }
    if let Some(s) = &cfg.hierarchy {
        out.extend(stages::hierarchy(s, cfg.seed)?);
    }
    if let Some(s) = &cfg.synth {
        out.extend(stages::synth(s, cfg.seed)?);
    }
    if let Some(s) = &cfg.predict {
        out.extend(stages::predict(s, cfg.seed)?);
    }
    out.promote(&cfg.output_dir)
        .map_err(|e| CliError::io(&cfg.output_dir, e))
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match resolve(cli).and_then(|cfg| run(&cfg)) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
