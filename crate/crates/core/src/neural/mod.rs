//! Dense feed-forward networks with exact reverse-mode gradients, Adam,
//! Gumbel-softmax relaxation and inverted dropout.

mod adam;
mod net;

use alloc::vec::Vec;

use rand_core::RngCore;

pub use adam::{adam_step, AdamState};
pub use net::{Activation, Dense, DenseNet, Gradients, Matrix, Tape, LEAKY_SLOPE};

use crate::random::Sampling;

/// Standard Gumbel draw `-ln(-ln u)` with `u` strictly inside `(0, 1)`.
pub fn gumbel_noise<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    -libm::log(-libm::log(rng.open_uniform()))
}

/// `softmax((logits + noise) / temperature)` for caller-supplied noise.
pub fn gumbel_softmax_with_noise(logits: &[f64], noise: &[f64], temperature: f64) -> Vec<f64> {
    let mut y: Vec<f64> = logits.iter().zip(noise).map(|(l, g)| l + g).collect();
    net::softmax_in_place(&mut y, temperature);
    y
}

/// In-place `softmax(v / temperature)`, entries floored at the smallest
/// positive normal.
pub fn softmax(v: &mut [f64], temperature: f64) {
    net::softmax_in_place(v, temperature);
}

/// Relaxed categorical sample; every entry is strictly positive and the
/// entries sum to one.
pub fn gumbel_softmax<R: RngCore + ?Sized>(logits: &[f64], temperature: f64, rng: &mut R) -> Vec<f64> {
    assert!(temperature > 0.0, "temperature must be positive");
    let noise: Vec<f64> = logits.iter().map(|_| gumbel_noise(rng)).collect();
    gumbel_softmax_with_noise(logits, &noise, temperature)
}

/// Backpropagates through a (Gumbel-)softmax output `y`: turns dL/dy into
/// dL/dlogits in place. Noise is held fixed.
pub fn softmax_backward(y: &[f64], grad: &mut [f64], temperature: f64) {
    net::softmax_backward(y, grad, temperature);
}

/// Inverted-dropout mask: each entry is `0` with probability `rate`,
/// otherwise `1 / (1 - rate)`.
pub fn dropout_mask<R: RngCore + ?Sized>(width: usize, rate: f64, rng: &mut R) -> Vec<f64> {
    assert!((0.0..1.0).contains(&rate), "dropout rate must lie in [0, 1)");
    if rate == 0.0 {
        return alloc::vec![1.0; width];
    }
    let keep = 1.0 / (1.0 - rate);
    (0..width)
        .map(|_| if rng.bernoulli(rate) { 0.0 } else { keep })
        .collect()
}
