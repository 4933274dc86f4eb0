//! Variational Bayesian Gaussian mixture for a single continuous column.
//!
//! The model is a finite mixture with a symmetric Dirichlet prior on the
//! weights and a Normal-Gamma prior on each component's mean and precision
//! (the one-dimensional Normal-Wishart). Prior hyperparameters follow the
//! usual empirical choices: the mean prior is the data mean with unit
//! pseudo-count, the scale prior is the data variance with one degree of
//! freedom.
//!
//! Fitting runs coordinate-ascent variational inference from a k-means++
//! start. Plain coordinate ascent leaves redundant components splitting a
//! single mode between them for a very long time, so once it converges we
//! try deleting components (smallest weight first), rerun inference from the
//! reassigned responsibilities and keep the deletion whenever the evidence
//! lower bound improves. Surviving components whose expected weight is under
//! the floor are dropped from the returned model.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use libm::{exp, log, lgamma, sqrt};
use serde::{Deserialize, Serialize};

use crate::random::{self, Sampling};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub weight: f64,
    pub mean: f64,
    pub std: f64,
}

/// Fitted mixture for one column: `modes.len()` is the effective mode count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnModeModel {
    modes: Vec<Mode>,
}

impl ColumnModeModel {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("a mode model needs at least one mode"));
        }
        let mut total = 0.0;
        for m in &modes {
            if !(m.weight > 0.0) || !(m.std > 0.0) || !m.mean.is_finite() || !m.std.is_finite() {
                return Err(Error::invalid("mode weights and stds must be positive and finite"));
            }
            total += m.weight;
        }
        if total > 1.0 + 1e-9 {
            return Err(Error::invalid("mode weights sum above one"));
        }
        Ok(ColumnModeModel { modes })
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VgmConfig {
    pub max_modes: usize,
    pub weight_floor: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Dirichlet concentration per component; `None` means `1 / max_modes`.
    pub concentration: Option<f64>,
}

impl Default for VgmConfig {
    fn default() -> Self {
        VgmConfig {
            max_modes: 10,
            weight_floor: 0.005,
            max_iter: 200,
            tol: 1e-4,
            concentration: None,
        }
    }
}

pub fn fit_vgm(values: &[f64], max_modes: usize, seed: u64) -> Result<ColumnModeModel> {
    let config = VgmConfig {
        max_modes,
        ..VgmConfig::default()
    };
    fit_vgm_with(values, &config, seed)
}

pub fn fit_vgm_with(values: &[f64], config: &VgmConfig, seed: u64) -> Result<ColumnModeModel> {
    if config.max_modes == 0 {
        return Err(Error::invalid("max_modes must be at least 1"));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("non-finite value in column"));
    }
    let Some(&first) = values.first() else {
        return Err(Error::DegenerateColumn);
    };
    if values.iter().all(|&x| x == first) {
        return Err(Error::DegenerateColumn);
    }

    let n = values.len();
    let k = config.max_modes.min(n);
    let prior = Prior::from_data(values, config.concentration.unwrap_or(1.0 / config.max_modes as f64));
    let mut rng = random::seeded(seed);
    let resp = kmeans_resp(values, k, &mut rng);

    let mut best = run(values, resp, &prior, config);
    loop {
        let mut order: Vec<usize> = (0..k).filter(|&j| best.nk[j] > DEAD).collect();
        if order.len() <= 1 {
            break;
        }
        order.sort_by(|&a, &b| best.nk[a].total_cmp(&best.nk[b]).then(a.cmp(&b)));
        let mut improved = false;
        for &victim in &order {
            let Some(resp) = delete_component(values, &best, victim) else {
                continue;
            };
            let candidate = run(values, resp, &prior, config);
            if candidate.elbo > best.elbo + config.tol {
                best = candidate;
                improved = true;
                break;
            }
        }
        if !improved {
            break;
        }
    }

    let total_weight: f64 = best.weight_conc.iter().sum();
    let mut modes: Vec<Mode> = (0..k)
        .filter(|&j| best.nk[j] > DEAD)
        .map(|j| Mode {
            weight: best.weight_conc[j] / total_weight,
            mean: best.means[j],
            std: sqrt(best.covs[j]),
        })
        .filter(|m| m.weight >= config.weight_floor)
        .collect();
    if modes.is_empty() {
        // every component under the floor: keep the heaviest
        let j = (0..k)
            .max_by(|&a, &b| best.weight_conc[a].total_cmp(&best.weight_conc[b]))
            .unwrap_or(0);
        modes.push(Mode {
            weight: best.weight_conc[j] / total_weight,
            mean: best.means[j],
            std: sqrt(best.covs[j]),
        });
    }
    modes.sort_by(|a, b| a.mean.total_cmp(&b.mean));
    ColumnModeModel::new(modes)
}

/// Components whose effective count falls below this are treated as deleted.
const DEAD: f64 = 1e-6;

struct Prior {
    concentration: f64,
    mean: f64,
    mean_precision: f64,
    dof: f64,
    scale: f64,
}

impl Prior {
    fn from_data(values: &[f64], concentration: f64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Prior {
            concentration,
            mean,
            mean_precision: 1.0,
            dof: 1.0,
            scale: var,
        }
    }
}

struct Posterior {
    resp: Vec<f64>,
    nk: Vec<f64>,
    weight_conc: Vec<f64>,
    mean_prec: Vec<f64>,
    means: Vec<f64>,
    dof: Vec<f64>,
    covs: Vec<f64>,
    elbo: f64,
}

fn run(values: &[f64], mut resp: Vec<f64>, prior: &Prior, config: &VgmConfig) -> Posterior {
    let n = values.len();
    let k = resp.len() / n;
    let mut post = m_step(values, &resp, k, prior);
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..config.max_iter {
        let entropy = e_step(values, &post, &mut resp);
        post = m_step(values, &resp, k, prior);
        let elbo = lower_bound(&post, entropy);
        post.elbo = elbo;
        if (elbo - prev).abs() < config.tol {
            break;
        }
        prev = elbo;
    }
    post.resp = resp;
    post
}

fn m_step(values: &[f64], resp: &[f64], k: usize, prior: &Prior) -> Posterior {
    let mut nk = vec![0.0; k];
    let mut sum = vec![0.0; k];
    for (i, &x) in values.iter().enumerate() {
        for j in 0..k {
            let r = resp[i * k + j];
            nk[j] += r;
            sum[j] += r * x;
        }
    }
    let xbar: Vec<f64> = (0..k)
        .map(|j| if nk[j] > 0.0 { sum[j] / nk[j] } else { prior.mean })
        .collect();
    let mut sk = vec![0.0; k];
    for (i, &x) in values.iter().enumerate() {
        for j in 0..k {
            let d = x - xbar[j];
            sk[j] += resp[i * k + j] * d * d;
        }
    }
    let mut post = Posterior {
        resp: Vec::new(),
        nk: nk.clone(),
        weight_conc: vec![0.0; k],
        mean_prec: vec![0.0; k],
        means: vec![0.0; k],
        dof: vec![0.0; k],
        covs: vec![0.0; k],
        elbo: f64::NEG_INFINITY,
    };
    for j in 0..k {
        let nj = nk[j];
        let beta = prior.mean_precision + nj;
        let dof = prior.dof + nj;
        let diff = xbar[j] - prior.mean;
        post.weight_conc[j] = prior.concentration + nj;
        post.mean_prec[j] = beta;
        post.means[j] = (prior.mean_precision * prior.mean + nj * xbar[j]) / beta;
        post.dof[j] = dof;
        post.covs[j] =
            (prior.scale + sk[j] + nj * prior.mean_precision / beta * diff * diff) / dof;
    }
    post
}

/// Updates responsibilities in place and returns their entropy term
/// `-sum r log r`. Deleted components keep zero responsibility.
fn e_step(values: &[f64], post: &Posterior, resp: &mut [f64]) -> f64 {
    let k = post.nk.len();
    let alive: Vec<usize> = (0..k).filter(|&j| post.nk[j] > DEAD).collect();
    let total_conc: f64 = post.weight_conc.iter().sum();
    let dg_total = digamma(total_conc);
    let consts: Vec<(f64, f64, f64)> = alive
        .iter()
        .map(|&j| {
            let prec = 1.0 / post.covs[j];
            let log_pi = digamma(post.weight_conc[j]) - dg_total;
            let log_lambda = LN_2 + digamma(0.5 * post.dof[j]);
            let c = log_pi - 0.5 * log(2.0 * PI) + 0.5 * log(prec) - 0.5 * log(post.dof[j])
                + 0.5 * (log_lambda - 1.0 / post.mean_prec[j]);
            (post.means[j], prec, c)
        })
        .collect();
    let mut logp = vec![0.0; alive.len()];
    let mut entropy = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let mut hi = f64::NEG_INFINITY;
        for (slot, &(mean, prec, c)) in consts.iter().enumerate() {
            let d = x - mean;
            logp[slot] = c - 0.5 * d * d * prec;
            hi = hi.max(logp[slot]);
        }
        let norm = hi + log(logp.iter().map(|l| exp(l - hi)).sum::<f64>());
        let row = &mut resp[i * k..(i + 1) * k];
        row.iter_mut().for_each(|r| *r = 0.0);
        for (slot, &j) in alive.iter().enumerate() {
            let lr = logp[slot] - norm;
            let r = exp(lr);
            row[j] = r;
            if r > 0.0 {
                entropy -= r * lr;
            }
        }
    }
    entropy
}

/// Evidence lower bound up to an additive constant that depends only on the
/// prior and the number of components.
fn lower_bound(post: &Posterior, entropy: f64) -> f64 {
    let k = post.nk.len();
    let mut log_wishart = 0.0;
    let mut log_mean_prec = 0.0;
    for j in 0..k {
        let dof = post.dof[j];
        // log of the precision Cholesky factor of the scale matrix
        let log_det_chol = -0.5 * log(post.covs[j]) - 0.5 * log(dof);
        log_wishart += -(dof * log_det_chol + 0.5 * dof * LN_2 + lgamma(0.5 * dof));
        log_mean_prec += log(post.mean_prec[j]);
    }
    let total: f64 = post.weight_conc.iter().sum();
    let log_norm_weight =
        lgamma(total) - post.weight_conc.iter().map(|&a| lgamma(a)).sum::<f64>();
    entropy - log_wishart - log_norm_weight - 0.5 * log_mean_prec
}

/// Moves the victim's responsibility mass onto the remaining live
/// components. Rows whose remaining mass underflowed go to the nearest live
/// mean.
fn delete_component(values: &[f64], post: &Posterior, victim: usize) -> Option<Vec<f64>> {
    let n = values.len();
    let k = post.nk.len();
    let alive: Vec<usize> = (0..k).filter(|&j| j != victim && post.nk[j] > DEAD).collect();
    if alive.is_empty() {
        return None;
    }
    let mut resp = post.resp.clone();
    for i in 0..n {
        let row = &mut resp[i * k..(i + 1) * k];
        row[victim] = 0.0;
        let s: f64 = row.iter().sum();
        if s > 1e-12 {
            row.iter_mut().for_each(|r| *r /= s);
        } else {
            row.iter_mut().for_each(|r| *r = 0.0);
            let nearest = alive
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    (values[i] - post.means[a])
                        .abs()
                        .total_cmp(&(values[i] - post.means[b]).abs())
                })
                .unwrap_or(alive[0]);
            row[nearest] = 1.0;
        }
    }
    Some(resp)
}

/// Hard k-means assignment (k-means++ seeding, Lloyd iterations) as one-hot
/// responsibilities.
fn kmeans_resp<R: rand_core::RngCore>(values: &[f64], k: usize, rng: &mut R) -> Vec<f64> {
    let n = values.len();
    let mut centers = Vec::with_capacity(k);
    centers.push(values[rng.below(n)]);
    let mut dist: Vec<f64> = values.iter().map(|x| (x - centers[0]) * (x - centers[0])).collect();
    while centers.len() < k {
        let c = values[rng.weighted_index(&dist)];
        centers.push(c);
        for (d, x) in dist.iter_mut().zip(values) {
            *d = d.min((x - c) * (x - c));
        }
    }
    let mut labels = vec![0usize; n];
    for _ in 0..50 {
        let mut changed = false;
        for (i, &x) in values.iter().enumerate() {
            let best = (0..k)
                .min_by(|&a, &b| (x - centers[a]).abs().total_cmp(&(x - centers[b]).abs()))
                .unwrap_or(0);
            if best != labels[i] {
                labels[i] = best;
                changed = true;
            }
        }
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&l, &x) in labels.iter().zip(values) {
            sums[l] += x;
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j] / counts[j] as f64;
            }
        }
        if !changed {
            break;
        }
    }
    let mut resp = vec![0.0; n * k];
    for (i, &l) in labels.iter().enumerate() {
        resp[i * k + l] = 1.0;
    }
    resp
}

/// Digamma via upward recurrence to x >= 6 then the asymptotic series.
pub(crate) fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 6.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    acc + log(x) - 0.5 * inv - series
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture(means: &[f64], std: f64, per: usize, seed: u64) -> Vec<f64> {
        let mut r = random::seeded(seed);
        means
            .iter()
            .flat_map(|&m| (0..per).map(move |_| m).collect::<Vec<_>>())
            .map(|m| m + std * r.normal())
            .collect()
    }

    #[test]
    fn digamma_matches_reference() {
        for &x in &[0.01, 0.1, 0.5, 1.0, 2.5, 7.0, 40.0, 1234.5] {
            let want = statrs::function::gamma::digamma(x);
            assert!((digamma(x) - want).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn single_gaussian_one_mode() {
        let xs = mixture(&[0.0], 1.0, 5000, 11);
        let m = fit_vgm(&xs, 10, 1).unwrap();
        assert_eq!(m.mode_count(), 1, "{m:?}");
        assert!(m.modes()[0].mean.abs() < 0.1);
        assert!((m.modes()[0].std - 1.0).abs() < 0.1);
    }

    #[test]
    fn three_modes_recovered() {
        let xs = mixture(&[-4.0, 0.0, 4.0], 0.5, 2000, 21);
        let m = fit_vgm(&xs, 10, 2).unwrap();
        assert_eq!(m.mode_count(), 3, "{m:?}");
        for (mode, want) in m.modes().iter().zip([-4.0, 0.0, 4.0]) {
            assert!((mode.mean - want).abs() < 0.15);
        }
    }

    #[test]
    fn constant_column_is_degenerate() {
        assert_eq!(fit_vgm(&[7.0; 20], 10, 0), Err(Error::DegenerateColumn));
        assert_eq!(fit_vgm(&[], 10, 0), Err(Error::DegenerateColumn));
    }

    #[test]
    fn invariants_hold_on_small_columns() {
        let xs = [1.0, 2.0, 2.5, 9.0, 9.5];
        let m = fit_vgm(&xs, 10, 3).unwrap();
        let total: f64 = m.modes().iter().map(|m| m.weight).sum();
        assert!(total <= 1.0 + 1e-9);
        assert!(m.mode_count() >= 1 && m.mode_count() <= 10);
        assert!(m.modes().iter().all(|m| m.std > 0.0 && m.weight > 0.0));
    }

    #[test]
    fn k_max_one() {
        let xs = mixture(&[-4.0, 4.0], 0.5, 200, 5);
        let m = fit_vgm(&xs, 1, 0).unwrap();
        assert_eq!(m.mode_count(), 1);
    }
}
