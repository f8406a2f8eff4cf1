use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{DenoiseExample, MaskMode};
use super::params::{ModelDims, ToyModelParams};
use super::task::{sample, TaskKind, TaskShape, Timestep};
use crate::error::ToyError;
use crate::vocab::AttributeVocabulary;

// Independent RNG streams derived from one seed.
const STREAM_TRAIN: u64 = 0;
const STREAM_EVAL: u64 = 1;
const STREAM_INIT: u64 = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub steps: usize,
    pub learning_rate: f64,
    /// Model width.
    pub d: usize,
    /// Raw patch feature width.
    pub p: usize,
    /// Diffusion timesteps in the noise schedule.
    pub timesteps: usize,
    pub conflict_mode: bool,
    pub mask_enabled: bool,
    pub layers: usize,
    pub train_samples: usize,
    pub eval_samples: usize,
    pub target_patches: u32,
    pub additive_attribute: bool,
    pub max_positions: usize,
    /// Training timesteps are drawn from `[min_train_timestep, timesteps)`.
    pub min_train_timestep: usize,
}

impl Default for TrainConfig {
    /// Copy task, one layer.
    fn default() -> Self {
        Self {
            seed: 0,
            steps: 500,
            learning_rate: 0.1,
            d: 8,
            p: 4,
            timesteps: 10,
            conflict_mode: false,
            mask_enabled: true,
            layers: 1,
            train_samples: 32,
            eval_samples: 64,
            target_patches: 2,
            additive_attribute: true,
            max_positions: 32,
            min_train_timestep: 0,
        }
    }
}

impl TrainConfig {
    /// Attribute-conflict task. Two layers so a target can read what an
    /// attribute token gathered; the additive attribute path is off so the
    /// token itself is the only carrier of the binding. Training is limited
    /// to the noisier half of the schedule, where copying `z_t` stops paying.
    pub fn conflict() -> Self {
        Self {
            steps: 800,
            learning_rate: 0.2,
            d: 16,
            conflict_mode: true,
            layers: 2,
            train_samples: 256,
            additive_attribute: false,
            min_train_timestep: 5,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ToyError> {
        let fail = |m: &str| Err(ToyError::Config(m.to_string()));
        if self.steps < 1 {
            return fail("steps must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning rate must be positive");
        }
        if self.d == 0 || self.p == 0 || self.timesteps == 0 || self.target_patches == 0 {
            return fail("dimensions must be positive");
        }
        if self.min_train_timestep >= self.timesteps {
            return fail("min_train_timestep must be below timesteps");
        }
        if !(1..=4).contains(&self.layers) {
            return fail("layers must be between 1 and 4");
        }
        if self.train_samples == 0 || self.eval_samples == 0 {
            return fail("sample counts must be positive");
        }
        Ok(())
    }

    pub fn task(&self) -> TaskKind {
        if self.conflict_mode {
            TaskKind::Conflict
        } else {
            TaskKind::Copy
        }
    }

    fn shape(&self) -> TaskShape {
        TaskShape { p: self.p, target_patches: self.target_patches, schedule_len: self.timesteps }
    }

    pub fn dims(&self, vocab: &AttributeVocabulary) -> ModelDims {
        ModelDims { d: self.d, p: self.p, attributes: vocab.len(), max_positions: self.max_positions, layers: self.layers }
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    pub fn initial_params(&self, vocab: &AttributeVocabulary) -> ToyModelParams {
        let mut params = ToyModelParams::random(&mut self.rng(STREAM_INIT), self.dims(vocab));
        params.additive_attribute = self.additive_attribute;
        params
    }

    /// Training set: random timesteps from `[min_train_timestep, timesteps)`.
    pub fn training_set(&self, vocab: &AttributeVocabulary, mode: MaskMode) -> Result<Vec<DenoiseExample>, ToyError> {
        let mut rng = self.rng(STREAM_TRAIN);
        (0..self.train_samples)
            .map(|_| sample(&mut rng, self.task(), vocab, self.shape(), Timestep::Random { min: self.min_train_timestep }, mode))
            .collect()
    }

    /// Held-out set from its own RNG stream, all at the noisiest timestep so
    /// the target can only be recovered from the conditioning.
    pub fn eval_set(&self, vocab: &AttributeVocabulary, mode: MaskMode) -> Result<Vec<DenoiseExample>, ToyError> {
        let mut rng = self.rng(STREAM_EVAL);
        let t = self.timesteps - 1;
        (0..self.eval_samples)
            .map(|_| sample(&mut rng, self.task(), vocab, self.shape(), Timestep::Fixed(t), mode))
            .collect()
    }
}

/// Mean loss and mean gradient over a batch, summed in batch order.
pub fn batch_loss_and_grad(examples: &[DenoiseExample], params: &ToyModelParams) -> Result<(f64, ToyModelParams), ToyError> {
    let mut total = 0.0;
    let mut grad = params.zeros_like();
    for ex in examples {
        let (loss, g) = ex.loss_and_grad(params)?;
        total += loss;
        grad.axpy(1.0, &g);
    }
    let n = examples.len() as f64;
    grad.scale(1.0 / n);
    Ok((total / n, grad))
}

pub fn mean_loss(examples: &[DenoiseExample], params: &ToyModelParams) -> Result<f64, ToyError> {
    let mut total = 0.0;
    for ex in examples {
        total += ex.loss(params)?;
    }
    Ok(total / examples.len() as f64)
}

#[derive(Debug, Clone)]
pub struct TrainedModel {
    /// `(step, loss)`; the loss is the full training-set loss before that
    /// step's update.
    pub trace: Vec<(usize, f64)>,
    pub params: ToyModelParams,
}

/// Full-batch gradient descent on the configured synthetic task.
pub fn train(config: &TrainConfig, vocab: &AttributeVocabulary) -> Result<TrainedModel, ToyError> {
    config.validate()?;
    let mode = MaskMode::from_enabled(config.mask_enabled);
    let data = config.training_set(vocab, mode)?;
    let mut params = config.initial_params(vocab);
    let mut trace = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let (loss, grad) = batch_loss_and_grad(&data, &params)?;
        if !loss.is_finite() {
            return Err(ToyError::DivergedLoss { step, loss });
        }
        trace.push((step, loss));
        params.axpy(-config.learning_rate, &grad);
        if !params.is_finite() {
            return Err(ToyError::DivergedLoss { step, loss: f64::NAN });
        }
    }
    Ok(TrainedModel { trace, params })
}

pub fn train_toy(config: &TrainConfig) -> Result<Vec<(usize, f64)>, ToyError> {
    Ok(train(config, &AttributeVocabulary::default())?.trace)
}

#[derive(Debug, Clone)]
pub struct ConflictResult {
    pub masked_mse: f64,
    pub unmasked_mse: f64,
    pub masked_trace: Vec<(usize, f64)>,
    pub unmasked_trace: Vec<(usize, f64)>,
}

/// Trains two models that differ only in `mask_enabled` (same seed, same
/// initial weights, same data) and reports held-out MSE for each.
///
/// `config.mask_enabled` is ignored; both settings are run.
pub fn conflict_benchmark(config: &TrainConfig) -> Result<ConflictResult, ToyError> {
    let vocab = AttributeVocabulary::default();
    let run = |enabled: bool| -> Result<(f64, Vec<(usize, f64)>), ToyError> {
        let cfg = TrainConfig { mask_enabled: enabled, ..config.clone() };
        let trained = train(&cfg, &vocab)?;
        let eval = cfg.eval_set(&vocab, MaskMode::from_enabled(enabled))?;
        Ok((mean_loss(&eval, &trained.params)?, trained.trace))
    };
    let ((masked_mse, masked_trace), (unmasked_mse, unmasked_trace)) = (run(true)?, run(false)?);
    Ok(ConflictResult { masked_mse, unmasked_mse, masked_trace, unmasked_trace })
}
