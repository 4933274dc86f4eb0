use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{Builder, Criterion, Tree, TreeParams};
use crate::gan::sigmoid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostParams {
    pub n_stages: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

impl Default for BoostParams {
    fn default() -> Self {
        BoostParams {
            n_stages: 100,
            learning_rate: 0.1,
            max_depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boosted {
    /// Log-odds of the training class-1 rate.
    pub base: f64,
    /// `(tree, weight)`: the weight is the learning rate times any
    /// backtracking shrinkage applied to that stage.
    pub stages: Vec<(Tree, f64)>,
    /// Mean training log-loss before the first stage and after each stage.
    pub train_loss: Vec<f64>,
}

impl Boosted {
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.base + self.stages.iter().map(|(t, w)| w * t.value(x)).sum::<f64>()
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }
}

fn log_loss(f: &[f64], y: &[f64]) -> f64 {
    let total: f64 = f
        .iter()
        .zip(y)
        .map(|(&f, &y)| crate::gan::softplus(f) - y * f)
        .sum();
    total / f.len() as f64
}

/// Stage-wise logistic boosting: each stage fits a squared-error tree to
/// the residuals `y - p`, sets leaf values by one Newton step, and halves
/// the stage weight until the training loss does not increase.
pub fn fit_boosting(x: &[Vec<f64>], y: &[usize], params: &BoostParams) -> Result<Boosted> {
    if params.n_stages == 0 {
        return Err(Error::invalid("boosting needs at least one stage"));
    }
    if !(params.learning_rate > 0.0) || params.max_depth == 0 {
        return Err(Error::invalid("learning rate and depth must be positive"));
    }
    if x.is_empty() {
        return Err(Error::EmptyTable);
    }
    let n = x.len();
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let rate = (yf.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let base = libm::log(rate / (1.0 - rate));
    let mut f = vec![base; n];
    let mut train_loss = vec![log_loss(&f, &yf)];
    let mut stages = Vec::with_capacity(params.n_stages);
    let tree_params = TreeParams {
        max_depth: Some(params.max_depth),
        min_samples_leaf: 1,
        min_samples_split: 2,
    };
    let mut rng = crate::random::seeded(0);
    for _ in 0..params.n_stages {
        let p: Vec<f64> = f.iter().map(|&v| sigmoid(v)).collect();
        let resid: Vec<f64> = yf.iter().zip(&p).map(|(y, p)| y - p).collect();
        let mut tree = Builder {
            x,
            y: &resid,
            criterion: Criterion::Mse,
            params: tree_params,
            max_features: None,
            rng: &mut rng,
        }
        .build((0..n).collect())?;

        let mut num = vec![0.0; tree.nodes.len()];
        let mut den = vec![0.0; tree.nodes.len()];
        let leaves: Vec<usize> = x.iter().map(|r| tree.leaf_index(r)).collect();
        for (i, &leaf) in leaves.iter().enumerate() {
            num[leaf] += resid[i];
            den[leaf] += p[i] * (1.0 - p[i]);
        }
        for (k, node) in tree.nodes.iter_mut().enumerate() {
            if node.split.is_none() {
                node.value = if den[k] > 1e-12 { num[k] / den[k] } else { 0.0 };
            }
        }

        let prev = *train_loss.last().expect("initial loss recorded");
        let mut weight = params.learning_rate;
        let mut accepted = None;
        for _ in 0..40 {
            let cand: Vec<f64> = f
                .iter()
                .zip(&leaves)
                .map(|(&fi, &leaf)| fi + weight * tree.nodes[leaf].value)
                .collect();
            let loss = log_loss(&cand, &yf);
            if loss <= prev {
                accepted = Some((cand, loss));
                break;
            }
            weight /= 2.0;
        }
        let (cand, loss) = accepted.unwrap_or_else(|| {
            weight = 0.0;
            (f.clone(), prev)
        });
        f = cand;
        train_loss.push(loss);
        stages.push((tree, weight));
    }
    Ok(Boosted {
        base,
        stages,
        train_loss,
    })
}
