//! Adversarial generator for scaled tabular rows.
//!
//! A generator maps Gaussian noise through one ReLU layer to a sigmoid output
//! in `[0, 1]^width`; a discriminator maps a row through one ReLU layer to a
//! sigmoid probability of being real. The discriminator ascends
//!
//! ```text
//! L = mean log D(real) + mean log(1 − D(fake))
//! ```
//!
//! and the generator descends the non-saturating surrogate
//! `−mean log D(fake)`. Probabilities are clipped to `[ε, 1 − ε]` inside
//! every logarithm.

use ndarray::{s, Array2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nn::{gaussian_matrix, Activation, Adam, Network};
use crate::rng::{self, Rng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GanError {
    #[error("probability {0} outside [0, 1]")]
    Domain(f64),
    #[error("empty probability vector")]
    Empty,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Divergence { epoch: usize },
    #[error("shape error: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanConfig {
    pub noise_dim: usize,
    pub generator_hidden: usize,
    pub discriminator_hidden: usize,
    pub learning_rate: f64,
    /// Adam first-moment decay.
    pub beta1: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub clip_epsilon: f64,
}

impl Default for GanConfig {
    fn default() -> Self {
        Self {
            noise_dim: 8,
            generator_hidden: 32,
            discriminator_hidden: 32,
            learning_rate: 2e-3,
            beta1: 0.5,
            epochs: 300,
            batch_size: 32,
            seed: rng::DEFAULT_SEED,
            clip_epsilon: 1e-6,
        }
    }
}

impl GanConfig {
    fn validate(&self) -> Result<(), GanError> {
        let bad = |m: &str| Err(GanError::Config(m.into()));
        if self.noise_dim == 0 || self.generator_hidden == 0 || self.discriminator_hidden == 0 {
            return bad("layer widths must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning rate must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return bad("beta1 must lie in [0, 1)");
        }
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 0.5) {
            return bad("clip epsilon must lie in (0, 0.5)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub epoch: usize,
    /// Batch mean of the two-player objective `L` before the discriminator step.
    pub d_objective: f64,
    /// Batch mean of the generator's non-saturating loss.
    pub g_objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    network: Network,
    noise_dim: usize,
    seed: u64,
    pub loss_history: Vec<LossRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowOrigin {
    Real,
    Synthetic,
}

impl RowOrigin {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Real => "real",
            Self::Synthetic => "synthetic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix {
    pub data: Array2<f64>,
    pub origin: Vec<RowOrigin>,
}

fn clip(p: f64, eps: f64) -> f64 {
    p.clamp(eps, 1.0 - eps)
}

/// The two-player objective on discriminator outputs for real and generated
/// rows.
pub fn gan_objective(d_real: &[f64], d_fake: &[f64], eps: f64) -> Result<f64, GanError> {
    if d_real.is_empty() || d_fake.is_empty() {
        return Err(GanError::Empty);
    }
    if let Some(p) = d_real
        .iter()
        .chain(d_fake)
        .find(|p| !(0.0..=1.0).contains(*p))
    {
        return Err(GanError::Domain(*p));
    }
    let real = d_real.iter().map(|p| clip(*p, eps).ln()).sum::<f64>() / d_real.len() as f64;
    let fake = d_fake.iter().map(|p| (1.0 - clip(*p, eps)).ln()).sum::<f64>() / d_fake.len() as f64;
    Ok(real + fake)
}

/// `∂ log clip(p) / ∂p`, zero where the clip is active.
fn dlog(p: f64, eps: f64) -> f64 {
    if p > eps && p < 1.0 - eps {
        1.0 / p
    } else {
        0.0
    }
}

struct Trainer<'a> {
    cfg: &'a GanConfig,
    gen: Network,
    disc: Network,
    g_opt: Adam,
    d_opt: Adam,
    rng: Rng,
}

impl Trainer<'_> {
    /// One discriminator step then one generator step; returns `(L, G loss)`.
    fn step(&mut self, real: &Array2<f64>) -> (f64, f64) {
        let eps = self.cfg.clip_epsilon;
        let b = real.nrows();
        let bf = b as f64;

        let z = gaussian_matrix(b, self.cfg.noise_dim, &mut self.rng);
        let fake = self.gen.forward(&z);
        let (p_real, c_real) = self.disc.forward_cached(real);
        let (p_fake, c_fake) = self.disc.forward_cached(&fake);
        let objective = gan_objective(
            p_real.column(0).as_slice().unwrap_or(&p_real.column(0).to_vec()),
            &p_fake.column(0).to_vec(),
            eps,
        )
        .unwrap_or(f64::NAN);
        // descend −L
        let g_real = p_real.mapv(|p| -dlog(p, eps) / bf);
        let g_fake = p_fake.mapv(|p| dlog(1.0 - p, eps) / bf);
        let (mut d_grads, _) = self.disc.backward(&c_real, &g_real);
        let (d_fake_grads, _) = self.disc.backward(&c_fake, &g_fake);
        for ((dw, db), (fw, fb)) in d_grads.layers.iter_mut().zip(&d_fake_grads.layers) {
            *dw += fw;
            *db += fb;
        }
        self.d_opt.step(&mut self.disc, &d_grads);

        let z = gaussian_matrix(b, self.cfg.noise_dim, &mut self.rng);
        let (fake, c_gen) = self.gen.forward_cached(&z);
        let (p, c_disc) = self.disc.forward_cached(&fake);
        let g_loss = -p.iter().map(|v| clip(*v, eps).ln()).sum::<f64>() / bf;
        let grad_p = p.mapv(|v| -dlog(v, eps) / bf);
        let (_, grad_fake) = self.disc.backward(&c_disc, &grad_p);
        let (g_grads, _) = self.gen.backward(&c_gen, &grad_fake);
        self.g_opt.step(&mut self.gen, &g_grads);

        (objective, g_loss)
    }
}

/// Trains on `rows` (already scaled, target column included).
pub fn train_gan(rows: &Array2<f64>, cfg: &GanConfig) -> Result<Generator, GanError> {
    cfg.validate()?;
    let (n, width) = rows.dim();
    if width == 0 {
        return Err(GanError::Shape("rows have no columns".into()));
    }
    if n < cfg.batch_size {
        return Err(GanError::Data(format!(
            "{n} rows is fewer than the batch size {}",
            cfg.batch_size
        )));
    }
    if rows.iter().any(|v| !v.is_finite()) {
        return Err(GanError::Data("non-finite value in training rows".into()));
    }

    let mut init = rng::stream(cfg.seed, 0);
    let gen = Network::new(
        &[cfg.noise_dim, cfg.generator_hidden, width],
        Activation::Relu,
        Activation::Sigmoid,
        &mut init,
    );
    let disc = Network::new(
        &[width, cfg.discriminator_hidden, 1],
        Activation::Relu,
        Activation::Sigmoid,
        &mut init,
    );
    let mut trainer = Trainer {
        cfg,
        g_opt: Adam::new(&gen, cfg.learning_rate, cfg.beta1),
        d_opt: Adam::new(&disc, cfg.learning_rate, cfg.beta1),
        gen,
        disc,
        rng: rng::stream(cfg.seed, 1),
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut trainer.rng);
        let (mut d_sum, mut g_sum, mut batches) = (0.0, 0.0, 0.0);
        for chunk in order.chunks(cfg.batch_size) {
            if chunk.len() < cfg.batch_size {
                continue;
            }
            let batch = rows.select(Axis(0), chunk);
            let (d, g) = trainer.step(&batch);
            d_sum += d;
            g_sum += g;
            batches += 1.0;
        }
        let record = LossRecord {
            epoch,
            d_objective: d_sum / batches,
            g_objective: g_sum / batches,
        };
        if !record.d_objective.is_finite() || !record.g_objective.is_finite() || !trainer.gen.all_finite() {
            return Err(GanError::Divergence { epoch });
        }
        history.push(record);
    }

    Ok(Generator {
        network: trainer.gen,
        noise_dim: cfg.noise_dim,
        seed: cfg.seed,
        loss_history: history,
    })
}

impl Generator {
    pub fn width(&self) -> usize {
        self.network.output_width()
    }

    pub fn noise_dim(&self) -> usize {
        self.noise_dim
    }

    pub fn training_seed(&self) -> u64 {
        self.seed
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.network.params()
    }

    pub fn loss_history_csv(&self) -> String {
        let mut out = String::from("epoch,d_objective,g_objective\n");
        for r in &self.loss_history {
            out.push_str(&format!("{},{},{}\n", r.epoch, r.d_objective, r.g_objective));
        }
        out
    }
}

/// Draws `n` synthetic rows.
pub fn sample(g: &Generator, n: usize, seed: u64) -> Array2<f64> {
    if n == 0 {
        return Array2::zeros((0, g.width()));
    }
    let z = gaussian_matrix(n, g.noise_dim, &mut rng::stream(seed, 0));
    g.network.forward(&z)
}

/// Appends `n` synthetic rows after the untouched training rows.
pub fn augment(train: &Array2<f64>, g: &Generator, n: usize, seed: u64) -> Result<AugmentedMatrix, GanError> {
    if train.ncols() != g.width() {
        return Err(GanError::Shape(format!(
            "generator produces {} columns, training rows have {}",
            g.width(),
            train.ncols()
        )));
    }
    let synthetic = sample(g, n, seed);
    let mut data = Array2::zeros((train.nrows() + n, train.ncols()));
    data.slice_mut(s![..train.nrows(), ..]).assign(train);
    data.slice_mut(s![train.nrows().., ..]).assign(&synthetic);
    let mut origin = vec![RowOrigin::Real; train.nrows()];
    origin.extend(std::iter::repeat_n(RowOrigin::Synthetic, n));
    Ok(AugmentedMatrix { data, origin })
}
