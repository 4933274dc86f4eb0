use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::dropout_mask;
use crate::random::Sampling;
use crate::{Error, Result};

/// Fixed leaky-ReLU slope used by the discriminator.
pub const LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Activation {
    Identity,
    Relu,
    LeakyRelu(f64),
    Tanh,
    Softmax,
}

/// Row-major batch of vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn row_vector(v: &[f64]) -> Self {
        Matrix {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            let row = out.row_mut(i);
            row[..self.cols].copy_from_slice(self.row(i));
            row[self.cols..].copy_from_slice(other.row(i));
        }
        Ok(out)
    }

    /// Columns `start..end` as a new matrix.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        let mut out = Matrix::zeros(self.rows, end - start);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[start..end]);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    /// `outputs x inputs`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub activation: Activation,
    /// Inverted dropout applied to this layer's output while training.
    #[serde(default)]
    pub dropout: f64,
}

impl Dense {
    /// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero bias.
    pub fn new<R: RngCore + ?Sized>(
        inputs: usize,
        outputs: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let limit = libm::sqrt(6.0 / (inputs + outputs) as f64);
        let weights = (0..inputs * outputs)
            .map(|_| (2.0 * rng.uniform() - 1.0) * limit)
            .collect();
        Dense {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
            activation,
            dropout: 0.0,
        }
    }

    pub fn with_dropout(mut self, rate: f64) -> Self {
        self.dropout = rate;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseNet {
    layers: Vec<Dense>,
}

/// Activations cached by a forward pass.
#[derive(Debug, Clone)]
pub struct Tape {
    inputs: Vec<Matrix>,
    outputs: Vec<Matrix>,
    masks: Vec<Option<Vec<f64>>>,
}

/// Parameter gradients, one `(weights, bias)` pair per layer.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| (vec![0.0; l.weights.len()], vec![0.0; l.bias.len()]))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|(w, b)| [w.as_slice(), b.as_slice()])
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(|s| s.iter().all(|x| x.is_finite()))
    }
}

impl DenseNet {
    pub fn new(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("a network needs at least one layer"));
        }
        for l in &layers {
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs {
                return Err(Error::DimensionMismatch {
                    expected: l.inputs * l.outputs,
                    found: l.weights.len(),
                });
            }
            if !(0.0..1.0).contains(&l.dropout) {
                return Err(Error::invalid("dropout rate must lie in [0, 1)"));
            }
        }
        for pair in layers.windows(2) {
            if pair[0].outputs != pair[1].inputs {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].outputs,
                    found: pair[1].inputs,
                });
            }
        }
        Ok(DenseNet { layers })
    }

    /// Stack of Glorot-initialized layers with widths `sizes[0] -> ... -> sizes[n]`;
    /// `hidden` is used for all but the last layer.
    pub fn mlp<R: RngCore + ?Sized>(
        sizes: &[usize],
        hidden: Activation,
        output: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::invalid("need input and output sizes"));
        }
        let last = sizes.len() - 2;
        let layers = sizes
            .windows(2)
            .enumerate()
            .map(|(i, w)| Dense::new(w[0], w[1], if i == last { output } else { hidden }, rng))
            .collect();
        DenseNet::new(layers)
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn params(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weights.as_slice(), l.bias.as_slice()])
    }

    pub fn params_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weights.as_mut_slice(), l.bias.as_mut_slice()])
    }

    pub fn is_finite(&self) -> bool {
        self.params().all(|s| s.iter().all(|x| x.is_finite()))
    }

    /// Inference pass over a batch (dropout disabled).
    pub fn forward_batch(&self, input: &Matrix) -> Result<(Matrix, Tape)> {
        self.run(input, None::<&mut crate::random::Rng>)
    }

    /// Training pass: layers with a dropout rate draw fresh masks from `rng`.
    pub fn forward_train<R: RngCore + ?Sized>(
        &self,
        input: &Matrix,
        rng: &mut R,
    ) -> Result<(Matrix, Tape)> {
        self.run(input, Some(rng))
    }

    pub fn forward(&self, input: &[f64]) -> Result<(Vec<f64>, Tape)> {
        let (out, tape) = self.forward_batch(&Matrix::row_vector(input))?;
        Ok((out.data, tape))
    }

    pub fn predict(&self, input: &Matrix) -> Result<Matrix> {
        self.forward_batch(input).map(|(out, _)| out)
    }

    fn run<R: RngCore + ?Sized>(&self, input: &Matrix, mut rng: Option<&mut R>) -> Result<(Matrix, Tape)> {
        if input.cols != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: input.cols,
            });
        }
        let mut tape = Tape {
            inputs: Vec::with_capacity(self.layers.len()),
            outputs: Vec::with_capacity(self.layers.len()),
            masks: Vec::with_capacity(self.layers.len()),
        };
        let mut x = input.clone();
        for layer in &self.layers {
            let mut y = affine(layer, &x);
            activate(layer.activation, &mut y);
            let mask = match rng.as_deref_mut() {
                Some(r) if layer.dropout > 0.0 => {
                    let m = dropout_mask(y.data.len(), layer.dropout, r);
                    y.data.iter_mut().zip(&m).for_each(|(v, k)| *v *= k);
                    Some(m)
                }
                _ => None,
            };
            tape.inputs.push(x);
            tape.outputs.push(y.clone());
            tape.masks.push(mask);
            x = y;
        }
        Ok((x, tape))
    }

    /// Reverse-mode pass: given dL/d(output) returns parameter gradients and
    /// dL/d(input).
    pub fn backward(&self, tape: &Tape, grad_output: &Matrix) -> Result<(Gradients, Matrix)> {
        let out = tape.outputs.last().ok_or(Error::invalid("empty tape"))?;
        if tape.outputs.len() != self.layers.len()
            || grad_output.cols != out.cols
            || grad_output.rows != out.rows
        {
            return Err(Error::DimensionMismatch {
                expected: out.rows * out.cols,
                found: grad_output.rows * grad_output.cols,
            });
        }
        let mut grads = Gradients::zeros_like(self);
        let mut g = grad_output.clone();
        for (li, layer) in self.layers.iter().enumerate().rev() {
            if let Some(mask) = &tape.masks[li] {
                g.data.iter_mut().zip(mask).for_each(|(v, k)| *v *= k);
            }
            // outputs are cached after masking; the derivative needs the raw value
            let y = &tape.outputs[li];
            activation_backward(layer.activation, y, tape.masks[li].as_deref(), &mut g);
            let x = &tape.inputs[li];
            let (gw, gb) = &mut grads.layers[li];
            let mut gx = Matrix::zeros(x.rows, x.cols);
            for b in 0..g.rows {
                let grow = g.row(b);
                let xrow = x.row(b);
                let gxrow = gx.row_mut(b);
                for (o, &d) in grow.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    gb[o] += d;
                    let wrow = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    let gwrow = &mut gw[o * layer.inputs..(o + 1) * layer.inputs];
                    for i in 0..layer.inputs {
                        gwrow[i] += d * xrow[i];
                        gxrow[i] += d * wrow[i];
                    }
                }
            }
            g = gx;
        }
        Ok((grads, g))
    }
}

fn affine(layer: &Dense, x: &Matrix) -> Matrix {
    let mut y = Matrix::zeros(x.rows, layer.outputs);
    for b in 0..x.rows {
        let xrow = x.row(b);
        let yrow = y.row_mut(b);
        for (o, out) in yrow.iter_mut().enumerate() {
            let wrow = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
            let mut acc = layer.bias[o];
            for (w, v) in wrow.iter().zip(xrow) {
                acc += w * v;
            }
            *out = acc;
        }
    }
    y
}

fn activate(act: Activation, y: &mut Matrix) {
    match act {
        Activation::Identity => {}
        Activation::Relu => y.data.iter_mut().for_each(|v| *v = v.max(0.0)),
        Activation::LeakyRelu(slope) => y.data.iter_mut().for_each(|v| {
            if *v < 0.0 {
                *v *= slope
            }
        }),
        Activation::Tanh => y.data.iter_mut().for_each(|v| *v = libm::tanh(*v)),
        Activation::Softmax => {
            for b in 0..y.rows {
                softmax_in_place(y.row_mut(b), 1.0);
            }
        }
    }
}

/// Numerically stable softmax of `v / temperature`, floored at the smallest
/// positive normal so every entry stays strictly positive.
pub(crate) fn softmax_in_place(v: &mut [f64], temperature: f64) {
    let hi = v.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut sum = 0.0;
    for x in v.iter_mut() {
        *x = libm::exp((*x - hi) / temperature);
        sum += *x;
    }
    for x in v.iter_mut() {
        *x = (*x / sum).max(f64::MIN_POSITIVE);
    }
}

/// Converts dL/dy into dL/dz in place. `y` holds the (possibly masked)
/// layer outputs; masked entries carry zero gradient already.
fn activation_backward(act: Activation, y: &Matrix, mask: Option<&[f64]>, g: &mut Matrix) {
    let unmasked = |i: usize| -> f64 {
        match mask {
            Some(m) if m[i] != 0.0 => y.data[i] / m[i],
            Some(_) => 0.0,
            None => y.data[i],
        }
    };
    match act {
        Activation::Identity => {}
        Activation::Relu => {
            for i in 0..g.data.len() {
                if unmasked(i) <= 0.0 {
                    g.data[i] = 0.0;
                }
            }
        }
        Activation::LeakyRelu(slope) => {
            for i in 0..g.data.len() {
                if unmasked(i) < 0.0 {
                    g.data[i] *= slope;
                }
            }
        }
        Activation::Tanh => {
            for i in 0..g.data.len() {
                let t = unmasked(i);
                g.data[i] *= 1.0 - t * t;
            }
        }
        Activation::Softmax => {
            for b in 0..g.rows {
                let start = b * g.cols;
                let ys: Vec<f64> = (start..start + g.cols).map(unmasked).collect();
                softmax_backward(&ys, g.row_mut(b), 1.0);
            }
        }
    }
}

/// dL/dz for `y = softmax(z / temperature)` given dL/dy, in place.
pub(crate) fn softmax_backward(y: &[f64], g: &mut [f64], temperature: f64) {
    let dot: f64 = y.iter().zip(g.iter()).map(|(a, b)| a * b).sum();
    for (gi, yi) in g.iter_mut().zip(y) {
        *gi = yi * (*gi - dot) / temperature;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::seeded;

    fn single(w: Vec<f64>, b: Vec<f64>, inputs: usize, act: Activation) -> DenseNet {
        let outputs = b.len();
        DenseNet::new(vec![Dense {
            inputs,
            outputs,
            weights: w,
            bias: b,
            activation: act,
            dropout: 0.0,
        }])
        .unwrap()
    }

    #[test]
    fn zero_weights_give_bias() {
        let net = single(vec![0.0; 6], vec![1.0, -2.0], 3, Activation::Identity);
        assert_eq!(net.forward(&[4.0, 5.0, 6.0]).unwrap().0, vec![1.0, -2.0]);
    }

    #[test]
    fn relu_and_leaky() {
        let net = single(vec![-1.0], vec![0.0], 1, Activation::Relu);
        assert_eq!(net.forward(&[3.0]).unwrap().0, vec![0.0]);
        let net = single(vec![1.0], vec![0.0], 1, Activation::LeakyRelu(LEAKY_SLOPE));
        assert_eq!(net.forward(&[-5.0]).unwrap().0, vec![-1.0]);
    }

    #[test]
    fn dimension_checks() {
        let net = single(vec![1.0], vec![0.0], 1, Activation::Identity);
        assert!(matches!(net.forward(&[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        let (_, tape) = net.forward(&[1.0]).unwrap();
        assert!(matches!(
            net.backward(&tape, &Matrix::zeros(1, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut r = seeded(0);
        let a = Dense::new(2, 3, Activation::Relu, &mut r);
        let b = Dense::new(4, 1, Activation::Identity, &mut r);
        assert!(DenseNet::new(vec![a, b]).is_err());
    }

    #[test]
    fn linear_neuron_derivative() {
        let net = single(vec![0.7], vec![0.0], 1, Activation::Identity);
        let (_, tape) = net.forward(&[2.0]).unwrap();
        let (g, gx) = net.backward(&tape, &Matrix::row_vector(&[1.0])).unwrap();
        assert_eq!(g.layers[0].0, vec![2.0]);
        assert_eq!(g.layers[0].1, vec![1.0]);
        assert_eq!(gx.data, vec![0.7]);
    }

    #[test]
    fn zero_output_gradient() {
        let mut r = seeded(3);
        let net = DenseNet::mlp(&[3, 5, 2], Activation::Tanh, Activation::Softmax, &mut r).unwrap();
        let (_, tape) = net.forward(&[0.1, -0.2, 0.3]).unwrap();
        let (g, _) = net.backward(&tape, &Matrix::zeros(1, 2)).unwrap();
        assert!(g.iter().all(|s| s.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn glorot_bounds() {
        let mut r = seeded(1);
        let l = Dense::new(10, 6, Activation::Relu, &mut r);
        let lim = (6.0f64 / 16.0).sqrt();
        assert!(l.weights.iter().all(|w| w.abs() <= lim));
        assert!(l.bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut r = seeded(2);
        let net = DenseNet::mlp(&[4, 6], Activation::Relu, Activation::Softmax, &mut r).unwrap();
        let (y, _) = net.forward(&[1.0, 2.0, -3.0, 0.5]).unwrap();
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dropout_only_in_training() {
        let mut r = seeded(2);
        let mut net = DenseNet::mlp(&[3, 50, 1], Activation::Relu, Activation::Identity, &mut r).unwrap();
        net.layers_mut()[0].dropout = 0.5;
        let x = Matrix::row_vector(&[1.0, 1.0, 1.0]);
        let a = net.predict(&x).unwrap();
        let b = net.predict(&x).unwrap();
        assert_eq!(a, b);
        let (_, tape) = net.forward_train(&x, &mut r).unwrap();
        let mask = tape.masks[0].as_ref().unwrap();
        assert!(mask.iter().any(|&m| m == 0.0));
        assert!(mask.iter().all(|&m| m == 0.0 || m == 2.0));
    }
}
