use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::design::Scaler;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Rbf,
    Linear,
    /// `(gamma * <x, z>)^3`
    Polynomial,
}

impl Kernel {
    pub fn eval(self, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => dot(a, b),
            Kernel::Polynomial => libm::pow(gamma * dot(a, b), 3.0),
            Kernel::Rbf => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                libm::exp(-gamma * d2)
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub kernel: Kernel,
    pub c: f64,
    pub gamma: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tolerance: f64,
    pub max_iter: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: Kernel::Rbf,
            c: 1.0,
            gamma: 10.0,
            tolerance: 1e-3,
            max_iter: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Svm {
    pub kernel: Kernel,
    pub gamma: f64,
    pub c: f64,
    pub scaler: Scaler,
    /// Standardized support vectors with their duals and `±1` labels.
    pub support: Vec<Vec<f64>>,
    pub duals: Vec<f64>,
    pub labels: Vec<f64>,
    pub bias: f64,
    /// False when the iteration cap stopped the solver first.
    pub converged: bool,
    pub iterations: usize,
    /// Maximal KKT violation at exit.
    pub kkt_gap: f64,
}

impl Svm {
    pub fn decision(&self, x: &[f64]) -> f64 {
        let z = self.scaler.apply(x);
        let s: f64 = self
            .support
            .iter()
            .zip(self.duals.iter().zip(&self.labels))
            .map(|(sv, (a, y))| a * y * self.kernel.eval(self.gamma, sv, &z))
            .sum();
        s + self.bias
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        usize::from(self.decision(x) > 0.0)
    }
}

/// C-SVC dual solved by SMO with second-order working-set selection.
/// Class 1 maps to `+1`, class 0 to `-1`.
pub fn fit_svm(x: &[Vec<f64>], y: &[usize], params: &SvmParams) -> Result<Svm> {
    if x.is_empty() {
        return Err(Error::EmptyTable);
    }
    if !(params.c > 0.0) || !(params.gamma > 0.0) || !(params.tolerance > 0.0) {
        return Err(Error::invalid("C, gamma and tolerance must be positive"));
    }
    let n = x.len();
    let scaler = Scaler::fit(x, &vec![true; x[0].len()]);
    let z: Vec<Vec<f64>> = x.iter().map(|r| scaler.apply(r)).collect();
    let lab: Vec<f64> = y.iter().map(|&v| if v == 1 { 1.0 } else { -1.0 }).collect();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = params.kernel.eval(params.gamma, &z[i], &z[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let c = params.c;
    let mut a = vec![0.0; n];
    let mut g = vec![-1.0; n];
    let tau = 1e-12;
    let up = |a: f64, y: f64| (y > 0.0 && a < c) || (y < 0.0 && a > 0.0);
    let low = |a: f64, y: f64| (y > 0.0 && a > 0.0) || (y < 0.0 && a < c);

    let mut iterations = 0;
    let mut converged = false;
    let mut gap = f64::INFINITY;
    while iterations < params.max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..n {
            if up(a[t], lab[t]) && -lab[t] * g[t] > gmax {
                gmax = -lab[t] * g[t];
                i_sel = t;
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !low(a[t], lab[t]) {
                continue;
            }
            let v = -lab[t] * g[t];
            gmin = gmin.min(v);
            if i_sel != usize::MAX && v < gmax {
                let b = gmax - v;
                let mut q = k[i_sel * n + i_sel] + k[t * n + t] - 2.0 * k[i_sel * n + t];
                if q <= 0.0 {
                    q = tau;
                }
                let obj = -b * b / q;
                if obj < best {
                    best = obj;
                    j_sel = t;
                }
            }
        }
        gap = gmax - gmin;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap < params.tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let (i, j) = (i_sel, j_sel);
        let (yi, yj) = (lab[i], lab[j]);
        let (ai_old, aj_old) = (a[i], a[j]);
        let mut quad = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
        if quad <= 0.0 {
            quad = tau;
        }
        if yi != yj {
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > 0.0 {
                if a[j] < 0.0 {
                    a[j] = 0.0;
                    a[i] = diff;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = -diff;
            }
            if diff > 0.0 {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < 0.0 {
                a[j] = 0.0;
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < 0.0 {
                a[i] = 0.0;
                a[j] = sum;
            }
        }
        let (di, dj) = (a[i] - ai_old, a[j] - aj_old);
        for t in 0..n {
            g[t] += lab[t] * (yi * k[t * n + i] * di + yj * k[t * n + j] * dj);
        }
    }

    // offset from free vectors, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..n {
        let yg = lab[t] * g[t];
        let at_upper = a[t] >= c;
        let at_lower = a[t] <= 0.0;
        if at_upper {
            if lab[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if at_lower {
            if lab[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        match (ub.is_finite(), lb.is_finite()) {
            (true, true) => (ub + lb) / 2.0,
            (true, false) => ub,
            (false, true) => lb,
            (false, false) => 0.0,
        }
    };

    let keep: Vec<usize> = (0..n).filter(|&t| a[t] > 0.0).collect();
    Ok(Svm {
        kernel: params.kernel,
        gamma: params.gamma,
        c,
        scaler,
        support: keep.iter().map(|&t| z[t].clone()).collect(),
        duals: keep.iter().map(|&t| a[t]).collect(),
        labels: keep.iter().map(|&t| lab[t]).collect(),
        bias: -rho,
        converged,
        iterations,
        kkt_gap: gap,
    })
}
