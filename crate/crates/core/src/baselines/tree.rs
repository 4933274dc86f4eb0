use alloc::vec::Vec;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::random::Sampling;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until the other limits stop it.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            min_samples_split: 2,
        }
    }
}

impl TreeParams {
    /// A split needs two children, so split minimums below 2 act as 2.
    pub fn normalized(self) -> Self {
        TreeParams {
            max_depth: self.max_depth,
            min_samples_leaf: self.min_samples_leaf.max(1),
            min_samples_split: self.min_samples_split.max(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub feature: usize,
    /// Rows with `x[feature] <= threshold` go left.
    pub threshold: f64,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    /// Per-sample impurity of the training rows reaching this node
    /// (Gini for classification, variance for regression).
    pub impurity: f64,
    pub samples: usize,
    /// Class-1 fraction (classification) or mean target (regression);
    /// boosting overwrites leaf values with Newton steps.
    pub value: f64,
    pub split: Option<Split>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    Gini,
    Mse,
}

/// Axis-aligned binary tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        while let Some(s) = self.nodes[i].split {
            i = if x[s.feature] <= s.threshold { s.left } else { s.right };
        }
        i
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.nodes[self.leaf_index(x)].value
    }

    /// Class vote: 1 when the leaf's class-1 fraction exceeds one half.
    pub fn vote(&self, x: &[f64]) -> usize {
        usize::from(self.value(x) > 0.5)
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i].split {
                Some(s) => 1 + go(t, s.left).max(go(t, s.right)),
                None => 0,
            }
        }
        go(self, 0)
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.split.is_none()).count()
    }

    pub fn is_consistent(&self) -> bool {
        let n = self.nodes.len();
        n > 0
            && self
                .nodes
                .iter()
                .enumerate()
                .all(|(i, node)| node.split.map_or(true, |s| s.left > i && s.right > i && s.left < n && s.right < n))
    }
}

/// Running sums over a sample set: weight, target sum, squared target sum.
#[derive(Debug, Clone, Copy, Default)]
struct Stats {
    w: f64,
    s: f64,
    ss: f64,
}

impl Stats {
    fn add(&mut self, y: f64) {
        self.w += 1.0;
        self.s += y;
        self.ss += y * y;
    }

    fn sub(self, o: Stats) -> Stats {
        Stats {
            w: self.w - o.w,
            s: self.s - o.s,
            ss: self.ss - o.ss,
        }
    }

    /// Total impurity: `w * gini` or the sum of squared errors.
    fn cost(&self, c: Criterion) -> f64 {
        if self.w <= 0.0 {
            return 0.0;
        }
        match c {
            Criterion::Gini => 2.0 * self.s * (self.w - self.s) / self.w,
            Criterion::Mse => (self.ss - self.s * self.s / self.w).max(0.0),
        }
    }
}

pub(crate) struct Builder<'a, R: RngCore + ?Sized> {
    pub x: &'a [Vec<f64>],
    pub y: &'a [f64],
    pub criterion: Criterion,
    pub params: TreeParams,
    /// Features examined per split; `None` means all.
    pub max_features: Option<usize>,
    pub rng: &'a mut R,
}

impl<R: RngCore + ?Sized> Builder<'_, R> {
    /// Grows a tree on `samples` (indices into `x`, repeats allowed).
    pub fn build(mut self, samples: Vec<usize>) -> Result<Tree> {
        if samples.is_empty() {
            return Err(Error::EmptyTable);
        }
        self.params = self.params.normalized();
        let mut nodes = Vec::new();
        self.grow(samples, 0, &mut nodes);
        Ok(Tree { nodes })
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize, nodes: &mut Vec<Node>) -> usize {
        let mut st = Stats::default();
        for &i in &samples {
            st.add(self.y[i]);
        }
        let me = nodes.len();
        nodes.push(Node {
            impurity: st.cost(self.criterion) / st.w,
            samples: samples.len(),
            value: st.s / st.w,
            split: None,
        });
        let can_split = self.params.max_depth.map_or(true, |d| depth < d)
            && samples.len() >= self.params.min_samples_split
            && nodes[me].impurity > 1e-15;
        if !can_split {
            return me;
        }
        let Some((feature, threshold)) = self.best_split(&samples, st) else {
            return me;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .into_iter()
            .partition(|&i| self.x[i][feature] <= threshold);
        let left = self.grow(l, depth + 1, nodes);
        let right = self.grow(r, depth + 1, nodes);
        nodes[me].split = Some(Split {
            feature,
            threshold,
            left,
            right,
        });
        me
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x[0].len();
        let mut all: Vec<usize> = (0..d).collect();
        match self.max_features {
            Some(k) if k < d => {
                // partial Fisher-Yates, then ascending order for the tie-break
                for i in 0..k {
                    let j = i + self.rng.below(d - i);
                    all.swap(i, j);
                }
                all.truncate(k);
                all.sort_unstable();
                all
            }
            _ => all,
        }
    }

    /// Lowest-cost split; ties keep the lowest feature, then the lowest
    /// threshold.
    fn best_split(&mut self, samples: &[usize], total: Stats) -> Option<(usize, f64)> {
        let min_leaf = self.params.min_samples_leaf;
        let n = samples.len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);
        for f in self.candidate_features() {
            pairs.clear();
            pairs.extend(samples.iter().map(|&i| (self.x[i][f], self.y[i])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = Stats::default();
            for i in 1..n {
                left.add(pairs[i - 1].1);
                if pairs[i - 1].0 == pairs[i].0 || i < min_leaf || n - i < min_leaf {
                    continue;
                }
                let cost = left.cost(self.criterion) + total.sub(left).cost(self.criterion);
                let better = match best {
                    None => true,
                    Some((b, _, _)) => cost < b - 1e-12 * b.abs().max(1.0),
                };
                if better {
                    let (a, c) = (pairs[i - 1].0, pairs[i].0);
                    let mid = a + (c - a) / 2.0;
                    let threshold = if mid < c { mid } else { a };
                    best = Some((cost, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

/// CART classifier on Gini impurity over all features.
pub fn fit_tree(x: &[Vec<f64>], y: &[usize], params: TreeParams) -> Result<Tree> {
    let yf: Vec<f64> = y.iter().map(|&v| v as f64).collect();
    let mut rng = crate::random::seeded(0);
    Builder {
        x,
        y: &yf,
        criterion: Criterion::Gini,
        params,
        max_features: None,
        rng: &mut rng,
    }
    .build((0..x.len()).collect())
}
