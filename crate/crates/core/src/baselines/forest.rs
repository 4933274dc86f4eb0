use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::tree::{Builder, Criterion, Tree, TreeParams};
use crate::random::{self, derive_seed, Sampling};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub tree: TreeParams,
    pub bootstrap: bool,
    /// Features tried per split; `None` uses `max(1, floor(sqrt(d)))`.
    pub max_features: Option<usize>,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 200,
            tree: TreeParams {
                max_depth: Some(15),
                min_samples_leaf: 2,
                min_samples_split: 15,
            },
            bootstrap: true,
            max_features: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<Tree>,
    /// Seed each member tree was grown from.
    pub seeds: Vec<u64>,
}

impl Forest {
    /// Fraction of member trees voting for class 1.
    pub fn vote_fraction(&self, x: &[f64]) -> f64 {
        let ones = self.trees.iter().filter(|t| t.vote(x) == 1).count();
        ones as f64 / self.trees.len() as f64
    }

    /// Majority vote; an even split goes to class 0.
    pub fn predict(&self, x: &[f64]) -> usize {
        let ones = self.trees.iter().filter(|t| t.vote(x) == 1).count();
        usize::from(2 * ones > self.trees.len())
    }
}

pub fn fit_forest(x: &[Vec<f64>], y: &[usize], params: &ForestParams, seed: u64) -> Result<Forest> {
    if params.n_estimators == 0 {
        return Err(Error::invalid("a forest needs at least one tree"));
    }
    if x.is_empty() {
        return Err(Error::EmptyTable);
    }
    let n = x.len();
    let d = x[0].len();
    let max_features = params
        .max_features
        .unwrap_or_else(|| (libm::floor(libm::sqrt(d as f64)) as usize).max(1));
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let mut trees = Vec::with_capacity(params.n_estimators);
    let mut seeds = Vec::with_capacity(params.n_estimators);
    for t in 0..params.n_estimators {
        let s = derive_seed(seed, t as u64);
        let mut rng = random::seeded(s);
        let samples: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.below(n)).collect()
        } else {
            (0..n).collect()
        };
        let tree = Builder {
            x,
            y: &yf,
            criterion: Criterion::Gini,
            params: params.tree,
            max_features: Some(max_features),
            rng: &mut rng,
        }
        .build(samples)?;
        trees.push(tree);
        seeds.push(s);
    }
    Ok(Forest { trees, seeds })
}
