use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::condition::{CondLayout, Condition, ConditionSampler};
use super::TrainConfig;
use crate::mode_norm::{RowEncoder, Segment};
use crate::neural::{gumbel_noise, softmax, softmax_backward, Activation, DenseNet, Matrix, Tape, LEAKY_SLOPE};
use crate::random::Sampling;
use crate::table::{DataTable, TableSchema, Value};
use crate::{Error, Result};

/// Output head for a slice of the generator's final layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Head {
    /// tanh scalar
    Alpha(usize),
    /// Gumbel-softmax block
    Simplex(usize, usize),
}

/// Conditional generator and discriminator bound to a fitted encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GanModel {
    pub encoder: RowEncoder,
    pub generator: DenseNet,
    pub discriminator: DenseNet,
    pub noise_dim: usize,
    pub temperature: f64,
    pub cond_layout: CondLayout,
    pub heads: Vec<Head>,
    /// Training-table category counts per discrete column.
    pub category_counts: Vec<Vec<usize>>,
}

/// Everything the generator's backward pass needs from a forward pass.
pub struct GeneratorPass {
    pub output: Matrix,
    tape: Tape,
}

impl GanModel {
    /// Freshly initialized (untrained) networks: both have two hidden layers,
    /// ReLU in the generator and leaky ReLU in the discriminator.
    pub fn new<R: RngCore + ?Sized>(
        encoder: RowEncoder,
        category_counts: Vec<Vec<usize>>,
        config: &TrainConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let cond_layout = CondLayout::new(encoder.schema());
        let width = encoder.width();
        let h = config.hidden_width;
        let generator = DenseNet::mlp(
            &[config.noise_dim + cond_layout.width, h, h, width],
            Activation::Relu,
            Activation::Identity,
            rng,
        )?;
        let mut discriminator = DenseNet::mlp(
            &[width + cond_layout.width, h, h, 1],
            Activation::LeakyRelu(LEAKY_SLOPE),
            Activation::Identity,
            rng,
        )?;
        let hidden = discriminator.layers().len() - 1;
        for layer in &mut discriminator.layers_mut()[..hidden] {
            layer.dropout = config.discriminator_dropout;
        }
        let heads = heads_for(&encoder);
        let model = GanModel {
            encoder,
            generator,
            discriminator,
            noise_dim: config.noise_dim,
            temperature: config.temperature,
            cond_layout,
            heads,
            category_counts,
        };
        model.check()?;
        Ok(model)
    }

    /// Width invariants between the encoder and both networks.
    pub fn check(&self) -> Result<()> {
        let width = self.encoder.width();
        let expect = |expected: usize, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected, found })
            }
        };
        expect(self.noise_dim + self.cond_layout.width, self.generator.input_dim())?;
        expect(width, self.generator.output_dim())?;
        expect(width + self.cond_layout.width, self.discriminator.input_dim())?;
        expect(1, self.discriminator.output_dim())?;
        ConditionSampler::from_counts(self.encoder.schema(), &self.category_counts)?;
        Ok(())
    }

    pub fn schema(&self) -> &TableSchema {
        self.encoder.schema()
    }

    pub fn condition_sampler(&self) -> Result<ConditionSampler> {
        ConditionSampler::from_counts(self.schema(), &self.category_counts)
    }

    /// Generator forward pass over a batch: `noise` is `batch x noise_dim`,
    /// `cond` is `batch x cond_width`. Heads draw their Gumbel noise from
    /// `rng`.
    pub fn generate<R: RngCore + ?Sized>(
        &self,
        noise: &Matrix,
        cond: &Matrix,
        rng: &mut R,
    ) -> Result<GeneratorPass> {
        if noise.cols != self.noise_dim {
            return Err(Error::DimensionMismatch {
                expected: self.noise_dim,
                found: noise.cols,
            });
        }
        let input = noise.hcat(cond)?;
        let (raw, tape) = self.generator.forward_batch(&input)?;
        let mut output = raw;
        for b in 0..output.rows {
            let row = output.row_mut(b);
            for head in &self.heads {
                match *head {
                    Head::Alpha(i) => row[i] = libm::tanh(row[i]),
                    Head::Simplex(start, len) => {
                        let block = &mut row[start..start + len];
                        for v in block.iter_mut() {
                            *v += gumbel_noise(rng);
                        }
                        softmax(block, self.temperature);
                    }
                }
            }
        }
        Ok(GeneratorPass { output, tape })
    }

    /// Backpropagates dL/d(generator output) through the heads and the
    /// generator network.
    pub fn generator_backward(
        &self,
        pass: &GeneratorPass,
        grad_output: &Matrix,
    ) -> Result<crate::neural::Gradients> {
        let mut g = grad_output.clone();
        for b in 0..g.rows {
            let y = pass.output.row(b);
            let grow = g.row_mut(b);
            for head in &self.heads {
                match *head {
                    Head::Alpha(i) => grow[i] *= 1.0 - y[i] * y[i],
                    Head::Simplex(start, len) => softmax_backward(
                        &y[start..start + len],
                        &mut grow[start..start + len],
                        self.temperature,
                    ),
                }
            }
        }
        let (grads, _) = self.generator.backward(&pass.tape, &g)?;
        Ok(grads)
    }

    /// Discriminator logits for encoded rows paired with conditions.
    pub fn discriminator_logits(&self, rows: &Matrix, cond: &Matrix) -> Result<(Matrix, Tape)> {
        self.discriminator.forward_batch(&rows.hcat(cond)?)
    }

    /// Training-mode logits: hidden-layer dropout masks come from `rng`.
    pub fn discriminator_train<R: RngCore + ?Sized>(
        &self,
        rows: &Matrix,
        cond: &Matrix,
        rng: &mut R,
    ) -> Result<(Matrix, Tape)> {
        self.discriminator.forward_train(&rows.hcat(cond)?, rng)
    }

    /// Single generator draw for one noise vector and condition.
    pub fn generator_sample<R: RngCore + ?Sized>(
        &self,
        noise: &[f64],
        cond: &Condition,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let pass = self.generate(&Matrix::row_vector(noise), &Matrix::row_vector(&cond.vector), rng)?;
        Ok(pass.output.data)
    }

    pub fn discriminator_score(&self, encoded: &[f64], cond: &Condition) -> Result<f64> {
        let width = self.encoder.width();
        if encoded.len() != width {
            return Err(Error::DimensionMismatch {
                expected: width,
                found: encoded.len(),
            });
        }
        let (logit, _) =
            self.discriminator_logits(&Matrix::row_vector(encoded), &Matrix::row_vector(&cond.vector))?;
        Ok(sigmoid(logit.data[0]))
    }

    /// Synthetic rows decoded through the encoder. With `condition` set,
    /// every row uses it; otherwise conditions are drawn by log-frequency
    /// from the stored training counts (none at all for a schema without
    /// discrete columns). The conditioned column is set to the conditioned
    /// category in the decoded row.
    pub fn sample_synthetic<R: RngCore + ?Sized>(
        &self,
        n: usize,
        condition: Option<&Condition>,
        rng: &mut R,
    ) -> Result<DataTable> {
        if n == 0 {
            return Err(Error::invalid("number of synthetic rows must be at least 1"));
        }
        let sampler = self.condition_sampler()?;
        let mut rows = Vec::with_capacity(n);
        let chunk = 256;
        let mut done = 0;
        while done < n {
            let m = chunk.min(n - done);
            let conds: Vec<Option<Condition>> = (0..m)
                .map(|_| condition.cloned().or_else(|| sampler.sample(rng)))
                .collect();
            let mut noise = Matrix::zeros(m, self.noise_dim);
            noise.data.iter_mut().for_each(|v| *v = rng.normal());
            let cond = cond_matrix(&conds, self.cond_layout.width);
            let pass = self.generate(&noise, &cond, rng)?;
            for (b, c) in conds.iter().enumerate() {
                let mut row = self.encoder.decode_row(pass.output.row(b))?;
                if let Some(c) = c {
                    row[c.column] = Value::Discrete(c.category);
                }
                rows.push(row);
            }
            done += m;
        }
        DataTable::new(self.schema().clone(), rows)
    }

    /// Original training rows followed by `n_syn` synthetic rows.
    pub fn augment<R: RngCore + ?Sized>(
        &self,
        train: &DataTable,
        n_syn: usize,
        rng: &mut R,
    ) -> Result<DataTable> {
        if train.schema() != self.schema() {
            return Err(Error::SchemaMismatch("model was trained on a different schema".into()));
        }
        if n_syn == 0 {
            return Ok(train.clone());
        }
        train.concat(&self.sample_synthetic(n_syn, None, rng)?)
    }
}

fn heads_for(encoder: &RowEncoder) -> Vec<Head> {
    let mut heads = Vec::new();
    for seg in &encoder.layout().segments {
        match seg {
            Segment::Mixture { alpha, beta, .. } => {
                heads.push(Head::Alpha(*alpha));
                heads.push(Head::Simplex(beta.start, beta.len()));
            }
            Segment::Constant { .. } => {}
            Segment::Discrete { range, .. } => heads.push(Head::Simplex(range.start, range.len())),
        }
    }
    heads
}

pub(crate) fn cond_matrix(conds: &[Option<Condition>], width: usize) -> Matrix {
    let mut m = Matrix::zeros(conds.len(), width);
    for (b, c) in conds.iter().enumerate() {
        if let Some(c) = c {
            m.row_mut(b).copy_from_slice(&c.vector);
        }
    }
    m
}

/// Logistic function, clamped so the result never rounds to exactly 0 or 1.
pub fn sigmoid(x: f64) -> f64 {
    let s = if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    };
    s.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + libm::log1p(libm::exp(-x))
    } else {
        libm::log1p(libm::exp(x))
    }
}
