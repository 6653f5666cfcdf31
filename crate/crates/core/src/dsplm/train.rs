use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{LossRow, PrefixLm};
use super::sample::{corrupt_input, split_text_sample, PrefixSample};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Masked-prefix reconstruction plus autoregressive target loss.
    Pretrain,
    /// Autoregressive target loss only.
    Finetune,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub steps: usize,
    pub corruption_ratio: f64,
    pub reconstruction_weight: f64,
    pub autoregressive_weight: f64,
    /// Rescale the batch gradient to at most this global L2 norm.
    pub clip_norm: Option<f64>,
    pub seed: u64,
    pub log_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            batch_size: 8,
            steps: 1000,
            corruption_ratio: 0.15,
            reconstruction_weight: 1.0,
            autoregressive_weight: 1.0,
            clip_norm: Some(1.0),
            seed: 0,
            log_every: 100,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(
                "train config",
                "learning rate must be positive",
            ));
        }
        if self.batch_size == 0 || self.steps == 0 {
            return Err(Error::invalid(
                "train config",
                "batch size and steps must be at least 1",
            ));
        }
        if !(self.corruption_ratio > 0.0 && self.corruption_ratio < 1.0) {
            return Err(Error::invalid(
                "train config",
                "corruption ratio must lie in (0, 1)",
            ));
        }
        if self.reconstruction_weight < 0.0 || self.autoregressive_weight < 0.0 {
            return Err(Error::invalid(
                "train config",
                "objective weights must be non-negative",
            ));
        }
        if matches!(self.clip_norm, Some(c) if !(c > 0.0)) {
            return Err(Error::invalid("train config", "clip norm must be positive"));
        }
        Ok(())
    }
}

/// Input tokens, prefix length and loss terms for one sample.
pub fn loss_terms(
    sample: &PrefixSample,
    objective: Objective,
    config: &TrainConfig,
    corruption_seed: u64,
) -> Result<(Vec<u32>, usize, Vec<LossRow>)> {
    let p = sample.prefix.len();
    let mut tokens = sample.tokens();
    let t = sample.target.len() as f64;
    let mut rows: Vec<LossRow> = sample
        .target
        .iter()
        .enumerate()
        .map(|(k, &target)| LossRow {
            position: p - 1 + k,
            target,
            weight: match objective {
                Objective::Pretrain => config.autoregressive_weight / t,
                Objective::Finetune => 1.0 / t,
            },
        })
        .collect();
    if objective == Objective::Pretrain && config.reconstruction_weight > 0.0 {
        let c = corrupt_input(&sample.prefix, config.corruption_ratio, corruption_seed)?;
        let m = c.targets.len() as f64;
        tokens[..p].copy_from_slice(&c.tokens);
        rows.extend(c.targets.iter().map(|&(position, target)| LossRow {
            position,
            target,
            weight: config.reconstruction_weight / m,
        }));
    }
    Ok((tokens, p, rows))
}

fn corruption_seed(config: &TrainConfig, step: usize, index: usize) -> u64 {
    config
        .seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((step as u64) << 20)
        .wrapping_add(index as u64)
}

/// One SGD step on the mean loss of `batch`. Returns that loss.
pub fn train_step<T: Scalar>(
    model: &mut PrefixLm<T>,
    batch: &[PrefixSample],
    config: &TrainConfig,
    objective: Objective,
    step: usize,
) -> Result<f64> {
    if batch.is_empty() {
        return Err(Error::Empty("training batch"));
    }
    let mut grad = vec![T::zero(); model.num_params()];
    let mut loss = 0.0;
    let scale = 1.0 / batch.len() as f64;
    for (i, sample) in batch.iter().enumerate() {
        let (tokens, p, mut rows) =
            loss_terms(sample, objective, config, corruption_seed(config, step, i))?;
        for r in &mut rows {
            r.weight *= scale;
        }
        loss += model.loss_and_grad(&tokens, p, &rows, &mut grad)?.as_f64();
    }
    if !loss.is_finite() {
        return Err(Error::Diverged { step });
    }
    let mut factor = config.learning_rate;
    if let Some(clip) = config.clip_norm {
        let norm = grad
            .iter()
            .map(|g| g.as_f64() * g.as_f64())
            .sum::<f64>()
            .sqrt();
        if !norm.is_finite() {
            return Err(Error::Diverged { step });
        }
        if norm > clip {
            factor *= clip / norm;
        }
    }
    let factor = T::of(factor);
    for (w, g) in model.weights_mut().iter_mut().zip(&grad) {
        *w -= factor * *g;
    }
    Ok(loss)
}

/// Cycles through shuffled epochs of `0..n`.
struct Batcher {
    order: Vec<usize>,
    cursor: usize,
}

impl Batcher {
    fn new(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            cursor: n,
        }
    }

    fn next_batch(&mut self, size: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        (0..size)
            .map(|_| {
                if self.cursor == self.order.len() {
                    self.order.shuffle(rng);
                    self.cursor = 0;
                }
                self.cursor += 1;
                self.order[self.cursor - 1]
            })
            .collect()
    }
}

/// Loss per step, for logging and inspection.
pub type LossCurve = Vec<f64>;

/// Domain pretraining: each text is split at a random point into prefix and target.
pub fn pretrain<T: Scalar, S: AsRef<str>>(
    model: &mut PrefixLm<T>,
    corpus: &[S],
    config: &TrainConfig,
) -> Result<LossCurve> {
    config.validate()?;
    let limit = model.config().max_len - 1;
    let mut texts = Vec::with_capacity(corpus.len());
    for t in corpus {
        let mut ids = model.vocab().encode(t.as_ref())?;
        ids.truncate(limit);
        if ids.len() >= 2 {
            texts.push(ids);
        }
    }
    if texts.is_empty() {
        return Err(Error::Empty("pretraining corpus"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut batcher = Batcher::new(texts.len());
    let mut curve = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let batch = batcher
            .next_batch(config.batch_size, &mut rng)
            .into_iter()
            .map(|i| {
                let ids = &texts[i];
                split_text_sample(ids, rng.gen_range(1..ids.len()))
            })
            .collect::<Result<Vec<_>>>()?;
        let loss = train_step(model, &batch, config, Objective::Pretrain, step)?;
        log_progress("pretrain", step, config, loss);
        curve.push(loss);
    }
    Ok(curve)
}

/// Task fine-tuning on prefix samples with the autoregressive objective.
pub fn finetune<T: Scalar>(
    model: &mut PrefixLm<T>,
    samples: &[PrefixSample],
    config: &TrainConfig,
) -> Result<LossCurve> {
    config.validate()?;
    if samples.is_empty() {
        return Err(Error::Empty("fine-tuning samples"));
    }
    for s in samples {
        s.check_len(model.config().max_len)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut batcher = Batcher::new(samples.len());
    let mut curve = Vec::with_capacity(config.steps);
    for step in 0..config.steps {
        let batch: Vec<PrefixSample> = batcher
            .next_batch(config.batch_size, &mut rng)
            .into_iter()
            .map(|i| samples[i].clone())
            .collect();
        let loss = train_step(model, &batch, config, Objective::Finetune, step)?;
        log_progress("finetune", step, config, loss);
        curve.push(loss);
    }
    Ok(curve)
}

fn log_progress(phase: &str, step: usize, config: &TrainConfig, loss: f64) {
    if config.log_every > 0 && (step % config.log_every == 0 || step + 1 == config.steps) {
        log::info!("{phase} step {step}/{}: loss {loss:.4}", config.steps);
    }
}
