use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::net::{DenseNet, Gradients};
use crate::{Error, Result};

/// Adam with bias correction. Moment buffers are flat, in the order of
/// [`DenseNet::params`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step: u64,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl AdamState {
    pub fn new(param_count: usize, learning_rate: f64, beta1: f64, beta2: f64) -> Self {
        AdamState {
            learning_rate,
            beta1,
            beta2,
            epsilon: 1e-8,
            step: 0,
            first: vec![0.0; param_count],
            second: vec![0.0; param_count],
        }
    }

    /// Moments used for GAN training.
    pub fn for_gan(net: &DenseNet, learning_rate: f64) -> Self {
        AdamState::new(net.param_count(), learning_rate, 0.5, 0.9)
    }

    /// Library-default moments used for the baseline classifier.
    pub fn for_classifier(net: &DenseNet, learning_rate: f64) -> Self {
        AdamState::new(net.param_count(), learning_rate, 0.9, 0.999)
    }

    /// One update over parallel parameter/gradient slices.
    pub fn update<'a>(
        &mut self,
        params: impl Iterator<Item = &'a mut [f64]>,
        grads: impl Iterator<Item = &'a [f64]>,
    ) -> Result<()> {
        self.step += 1;
        let t = self.step as f64;
        let c1 = 1.0 - libm::pow(self.beta1, t);
        let c2 = 1.0 - libm::pow(self.beta2, t);
        let mut offset = 0;
        for (p, g) in params.zip(grads) {
            if p.len() != g.len() || offset + p.len() > self.first.len() {
                return Err(Error::DimensionMismatch {
                    expected: p.len(),
                    found: g.len(),
                });
            }
            for i in 0..p.len() {
                let m = &mut self.first[offset + i];
                let v = &mut self.second[offset + i];
                *m = self.beta1 * *m + (1.0 - self.beta1) * g[i];
                *v = self.beta2 * *v + (1.0 - self.beta2) * g[i] * g[i];
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                p[i] -= self.learning_rate * m_hat / (libm::sqrt(v_hat) + self.epsilon);
            }
            offset += p.len();
        }
        if offset != self.first.len() {
            return Err(Error::DimensionMismatch {
                expected: self.first.len(),
                found: offset,
            });
        }
        Ok(())
    }
}

pub fn adam_step(net: &mut DenseNet, grads: &Gradients, state: &mut AdamState) -> Result<()> {
    let shapes_match = net.layers().len() == grads.layers.len()
        && net
            .layers()
            .iter()
            .zip(&grads.layers)
            .all(|(l, (w, b))| l.weights.len() == w.len() && l.bias.len() == b.len());
    if !shapes_match {
        return Err(Error::DimensionMismatch {
            expected: net.param_count(),
            found: grads.iter().map(<[f64]>::len).sum(),
        });
    }
    state.update(net.params_mut(), grads.iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::{Activation, DenseNet};
    use crate::random::seeded;

    #[test]
    fn one_step_from_zero_state() {
        let mut s = AdamState::new(1, 0.1, 0.5, 0.9);
        let mut p = [0.0];
        s.update([&mut p[..]].into_iter(), [&[1.0][..]].into_iter()).unwrap();
        assert!((p[0] + 0.1).abs() < 1e-8);
    }

    #[test]
    fn zero_gradient_no_move() {
        let mut r = seeded(0);
        let mut net = DenseNet::mlp(&[2, 3, 1], Activation::Relu, Activation::Identity, &mut r).unwrap();
        let before = net.clone();
        let mut s = AdamState::for_gan(&net, 1e-3);
        let g = Gradients::zeros_like(&net);
        for _ in 0..5 {
            adam_step(&mut net, &g, &mut s).unwrap();
        }
        assert_eq!(net, before);
    }

    #[test]
    fn constant_gradient_descends() {
        let mut s = AdamState::new(2, 0.01, 0.9, 0.999);
        let mut p = [1.0, 1.0];
        for _ in 0..100 {
            s.update([&mut p[..]].into_iter(), [&[0.5, -2.0][..]].into_iter()).unwrap();
        }
        assert!(p[0] < 1.0 && p[1] > 1.0);
    }

    #[test]
    fn shape_mismatch() {
        let mut r = seeded(0);
        let mut net = DenseNet::mlp(&[2, 3, 1], Activation::Relu, Activation::Identity, &mut r).unwrap();
        let other = DenseNet::mlp(&[2, 4, 1], Activation::Relu, Activation::Identity, &mut r).unwrap();
        let mut s = AdamState::for_gan(&net, 1e-3);
        let g = Gradients::zeros_like(&other);
        assert!(matches!(adam_step(&mut net, &g, &mut s), Err(Error::DimensionMismatch { .. })));
    }
}
