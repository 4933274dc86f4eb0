use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::design::Scaler;
use crate::gan::sigmoid;
use crate::neural::{adam_step, Activation, AdamState, Dense, DenseNet, Matrix};
use crate::random::{self, derive_seed};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnParams {
    pub epochs: usize,
    pub batch_size: usize,
    pub hidden_width: usize,
    pub hidden_layers: usize,
    pub learning_rate: f64,
    pub dropout: f64,
}

impl Default for NnParams {
    fn default() -> Self {
        NnParams {
            epochs: 200,
            batch_size: 32,
            hidden_width: 10,
            hidden_layers: 2,
            learning_rate: 1e-4,
            dropout: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnModel {
    pub scaler: Scaler,
    /// Emits one logit; the class-1 probability is its sigmoid.
    pub net: DenseNet,
}

impl NnModel {
    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        let (out, _) = self.net.forward(&self.scaler.apply(x))?;
        Ok(sigmoid(out[0]))
    }
}

/// Dense ReLU network with dropout on the hidden layers, trained by Adam
/// on binary cross-entropy. `continuous` marks the features that are
/// standardized with training statistics.
pub fn fit_nn(
    x: &[Vec<f64>],
    y: &[usize],
    continuous: &[bool],
    params: &NnParams,
    seed: u64,
) -> Result<NnModel> {
    if params.epochs == 0 || params.batch_size == 0 || params.hidden_width == 0 {
        return Err(Error::invalid("epochs, batch size and width must be at least 1"));
    }
    if !(0.0..1.0).contains(&params.dropout) || !(params.learning_rate > 0.0) {
        return Err(Error::invalid("dropout must lie in [0, 1) and the learning rate be positive"));
    }
    if x.is_empty() {
        return Err(Error::EmptyTable);
    }
    let scaler = Scaler::fit(x, continuous);
    let z: Vec<Vec<f64>> = x.iter().map(|r| scaler.apply(r)).collect();
    let mut rng = random::seeded(derive_seed(seed, 0));
    let mut layers = Vec::new();
    let mut width = z[0].len();
    for _ in 0..params.hidden_layers {
        layers.push(Dense::new(width, params.hidden_width, Activation::Relu, &mut rng).with_dropout(params.dropout));
        width = params.hidden_width;
    }
    layers.push(Dense::new(width, 1, Activation::Identity, &mut rng));
    let mut net = DenseNet::new(layers)?;
    let mut opt = AdamState::for_classifier(&net, params.learning_rate);

    let mut order: Vec<usize> = (0..z.len()).collect();
    let mut batch_rng = random::seeded(derive_seed(seed, 1));
    for _ in 0..params.epochs {
        random::shuffle(&mut batch_rng, &mut order);
        for chunk in order.chunks(params.batch_size) {
            let rows: Vec<Vec<f64>> = chunk.iter().map(|&i| z[i].clone()).collect();
            let input = Matrix::from_rows(&rows)?;
            let (out, tape) = net.forward_train(&input, &mut batch_rng)?;
            let m = chunk.len() as f64;
            let mut grad = Matrix::zeros(chunk.len(), 1);
            for (b, &i) in chunk.iter().enumerate() {
                grad.data[b] = (sigmoid(out.data[b]) - y[i] as f64) / m;
            }
            let (grads, _) = net.backward(&tape, &grad)?;
            adam_step(&mut net, &grads, &mut opt)?;
        }
    }
    Ok(NnModel { scaler, net })
}
