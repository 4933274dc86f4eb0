use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::condition::{category_counts, Condition, ConditionSampler};
use super::model::{cond_matrix, sigmoid, softplus, GanModel};
use crate::mode_norm::{argmax, RowEncoder, VgmConfig};
use crate::neural::{adam_step, AdamState, Matrix};
use crate::random::{self, derive_seed, Rng, Sampling};
use crate::table::{self, DataTable};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub noise_dim: usize,
    pub hidden_width: usize,
    pub temperature: f64,
    pub discriminator_steps: usize,
    /// Dropout on the discriminator's hidden layers during training.
    pub discriminator_dropout: f64,
    /// Weight of the conditional cross-entropy term in the generator loss.
    pub cond_weight: f64,
    pub seed: u64,
    pub vgm: VgmConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            batch_size: 32,
            learning_rate: 2e-4,
            noise_dim: 128,
            hidden_width: 256,
            temperature: 0.2,
            discriminator_steps: 1,
            discriminator_dropout: 0.2,
            cond_weight: 1.0,
            seed: 0,
            vgm: VgmConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.epochs > 0
            && self.noise_dim > 0
            && self.hidden_width > 0
            && self.discriminator_steps > 0
            && self.learning_rate > 0.0
            && self.temperature > 0.0
            && self.cond_weight >= 0.0;
        if !positive {
            return Err(Error::invalid("training settings must be positive"));
        }
        if !(0.0..1.0).contains(&self.discriminator_dropout) {
            return Err(Error::invalid("discriminator dropout must be in [0, 1)"));
        }
        if self.batch_size < 2 {
            return Err(Error::invalid("batch size must be at least 2"));
        }
        Ok(())
    }
}

/// Mean losses over one epoch. `g_loss` is the adversarial part only;
/// `cond_penalty` is the weighted cross-entropy term added to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    pub d_loss: f64,
    pub g_loss: f64,
    pub cond_penalty: f64,
    /// Fraction of generator rows whose conditioned block's argmax missed
    /// the requested category.
    pub cond_mismatch: f64,
}

/// Owns the model, both optimizers, the encoded training rows and the
/// training RNG.
pub struct Trainer {
    model: GanModel,
    config: TrainConfig,
    encoded: Vec<Vec<f64>>,
    rows_by_category: Vec<Vec<Vec<usize>>>,
    sampler: ConditionSampler,
    g_opt: AdamState,
    d_opt: AdamState,
    rng: Rng,
    history: Vec<EpochLoss>,
}

struct GenStats {
    g_loss: f64,
    penalty: f64,
    mismatch: f64,
}

impl Trainer {
    /// Fits the mode-specific normalizer on `table` and initializes both
    /// networks.
    pub fn new(table: &DataTable, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let encoder = RowEncoder::fit(table, &config.vgm, derive_seed(config.seed, 1))?;
        Trainer::with_encoder(table, encoder, config)
    }

    pub fn with_encoder(table: &DataTable, encoder: RowEncoder, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        if encoder.schema() != table.schema() {
            return Err(Error::SchemaMismatch("encoder fitted on a different schema".into()));
        }
        let mut rng = random::seeded(derive_seed(config.seed, 2));
        let counts = category_counts(table);
        let model = GanModel::new(encoder, counts, config, &mut rng)?;
        let encoded = model.encoder.encode_table(table, &mut rng)?;
        let rows_by_category = table
            .schema()
            .discrete_columns()
            .map(|(col, _)| table::rows_by_category(table, col))
            .collect();
        let sampler = ConditionSampler::from_table(table)?;
        let g_opt = AdamState::for_gan(&model.generator, config.learning_rate);
        let d_opt = AdamState::for_gan(&model.discriminator, config.learning_rate);
        Ok(Trainer {
            model,
            config: config.clone(),
            encoded,
            rows_by_category,
            sampler,
            g_opt,
            d_opt,
            rng,
            history: Vec::new(),
        })
    }

    pub fn model(&self) -> &GanModel {
        &self.model
    }

    pub fn history(&self) -> &[EpochLoss] {
        &self.history
    }

    pub fn into_parts(self) -> (GanModel, Vec<EpochLoss>) {
        (self.model, self.history)
    }

    fn sample_conditions(&mut self) -> Vec<Option<Condition>> {
        (0..self.config.batch_size)
            .map(|_| self.sampler.sample(&mut self.rng))
            .collect()
    }

    fn noise(&mut self) -> Matrix {
        let mut z = Matrix::zeros(self.config.batch_size, self.model.noise_dim);
        z.data.iter_mut().for_each(|v| *v = self.rng.normal());
        z
    }

    /// Real encoded rows, each drawn uniformly among rows matching its
    /// condition (among all rows when unconditioned).
    fn real_batch(&mut self, conds: &[Option<Condition>]) -> Matrix {
        let width = self.model.encoder.width();
        let mut m = Matrix::zeros(conds.len(), width);
        for (b, c) in conds.iter().enumerate() {
            let idx = match c {
                Some(c) => {
                    let block = self
                        .model
                        .cond_layout
                        .blocks
                        .iter()
                        .position(|blk| blk.0 == c.column)
                        .expect("condition column is discrete");
                    let pool = &self.rows_by_category[block][c.category];
                    pool[self.rng.below(pool.len())]
                }
                None => self.rng.below(self.encoded.len()),
            };
            m.row_mut(b).copy_from_slice(&self.encoded[idx]);
        }
        m
    }

    /// One discriminator update; returns its loss
    /// `-mean[log D(real|c) + log(1 - D(fake|c))]`. Only discriminator
    /// parameters change.
    pub fn discriminator_step(&mut self) -> Result<f64> {
        let conds = self.sample_conditions();
        let cond = cond_matrix(&conds, self.model.cond_layout.width);
        let real = self.real_batch(&conds);
        let z = self.noise();
        let fake = self.model.generate(&z, &cond, &mut self.rng)?.output;

        let n = conds.len() as f64;
        let (real_logit, real_tape) = self.model.discriminator_train(&real, &cond, &mut self.rng)?;
        let (fake_logit, fake_tape) = self.model.discriminator_train(&fake, &cond, &mut self.rng)?;
        let mut loss = 0.0;
        let mut g_real = Matrix::zeros(real_logit.rows, 1);
        let mut g_fake = Matrix::zeros(fake_logit.rows, 1);
        for b in 0..real_logit.rows {
            let r = real_logit.data[b];
            let f = fake_logit.data[b];
            loss += softplus(-r) + softplus(f);
            g_real.data[b] = -(1.0 - sigmoid(r)) / n;
            g_fake.data[b] = sigmoid(f) / n;
        }
        let (mut grads, _) = self.model.discriminator.backward(&real_tape, &g_real)?;
        let (gf, _) = self.model.discriminator.backward(&fake_tape, &g_fake)?;
        for ((w, b), (fw, fb)) in grads.layers.iter_mut().zip(&gf.layers) {
            w.iter_mut().zip(fw).for_each(|(a, c)| *a += c);
            b.iter_mut().zip(fb).for_each(|(a, c)| *a += c);
        }
        adam_step(&mut self.model.discriminator, &grads, &mut self.d_opt)?;
        Ok(loss / n)
    }

    /// One generator update with the non-saturating loss
    /// `-mean log D(G(z, c) | c)` plus the conditional cross-entropy.
    /// Only generator parameters change.
    fn generator_update(&mut self) -> Result<GenStats> {
        let conds = self.sample_conditions();
        let cond = cond_matrix(&conds, self.model.cond_layout.width);
        let z = self.noise();
        let pass = self.model.generate(&z, &cond, &mut self.rng)?;
        let width = self.model.encoder.width();
        let n = conds.len() as f64;

        let (logit, tape) = self.model.discriminator_train(&pass.output, &cond, &mut self.rng)?;
        let mut g_logit = Matrix::zeros(logit.rows, 1);
        let mut g_loss = 0.0;
        for b in 0..logit.rows {
            let s = logit.data[b];
            g_loss += softplus(-s);
            g_logit.data[b] = -(1.0 - sigmoid(s)) / n;
        }
        let (_, g_input) = self.model.discriminator.backward(&tape, &g_logit)?;
        let mut g_out = g_input.columns(0, width);

        // cross-entropy on the conditioned block: dCE/dlogit = (y - onehot) / tau;
        // expressed as dL/dy = -w / (n y_k) on the target entry so it flows
        // through the same softmax backward as the adversarial gradient
        let mut penalty = 0.0;
        let mut mismatches = 0usize;
        for (b, c) in conds.iter().enumerate() {
            let Some(c) = c else { continue };
            let range = self
                .model
                .encoder
                .layout()
                .discrete_range(c.column)
                .expect("conditioned column is discrete");
            let y = &pass.output.row(b)[range.clone()];
            let yk = y[c.category];
            penalty += -libm::log(yk);
            if argmax(y) != c.category {
                mismatches += 1;
            }
            if self.config.cond_weight > 0.0 {
                g_out.row_mut(b)[range.start + c.category] += -self.config.cond_weight / (n * yk);
            }
        }
        let grads = self.model.generator_backward(&pass, &g_out)?;
        adam_step(&mut self.model.generator, &grads, &mut self.g_opt)?;
        Ok(GenStats {
            g_loss: g_loss / n,
            penalty: self.config.cond_weight * penalty / n,
            mismatch: mismatches as f64 / n,
        })
    }

    /// One generator update; returns `(adversarial loss, conditional penalty)`.
    pub fn generator_step(&mut self) -> Result<(f64, f64)> {
        let s = self.generator_update()?;
        Ok((s.g_loss, s.penalty))
    }

    /// Runs one epoch of `max(1, rows / batch)` alternating steps and
    /// records its mean losses.
    pub fn run_epoch(&mut self) -> Result<EpochLoss> {
        let epoch = self.history.len();
        let steps = (self.encoded.len() / self.config.batch_size).max(1);
        let (mut d_sum, mut g_sum, mut p_sum, mut m_sum) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..steps {
            for _ in 0..self.config.discriminator_steps {
                d_sum += self.discriminator_step()?;
            }
            let s = self.generator_update()?;
            g_sum += s.g_loss;
            p_sum += s.penalty;
            m_sum += s.mismatch;
        }
        let record = EpochLoss {
            epoch,
            d_loss: d_sum / (steps * self.config.discriminator_steps) as f64,
            g_loss: g_sum / steps as f64,
            cond_penalty: p_sum / steps as f64,
            cond_mismatch: m_sum / steps as f64,
        };
        let finite = record.d_loss.is_finite()
            && record.g_loss.is_finite()
            && record.cond_penalty.is_finite()
            && self.model.generator.is_finite()
            && self.model.discriminator.is_finite();
        if !finite {
            return Err(Error::TrainingDiverged { epoch });
        }
        self.history.push(record);
        Ok(record)
    }
}

/// Fits the encoder and trains for `config.epochs` epochs.
pub fn train(table: &DataTable, config: &TrainConfig) -> Result<(GanModel, Vec<EpochLoss>)> {
    let mut trainer = Trainer::new(table, config)?;
    for _ in 0..config.epochs {
        trainer.run_epoch()?;
    }
    Ok(trainer.into_parts())
}

pub fn train_with_encoder(
    table: &DataTable,
    encoder: RowEncoder,
    config: &TrainConfig,
) -> Result<(GanModel, Vec<EpochLoss>)> {
    let mut trainer = Trainer::with_encoder(table, encoder, config)?;
    for _ in 0..config.epochs {
        trainer.run_epoch()?;
    }
    Ok(trainer.into_parts())
}
