//! Hard-margin dual QP: maximize `W(λ) = λ'1 − ½ λ'Dλ` subject to `λ ≥ 0`
//! and `λ'y = 0`, with `D_ij = y_i y_j K_ij`.

use crate::linalg::Matrix;
use crate::{Error, Result};

/// KKT violation below which the solver stops.
pub const KKT_TOLERANCE: f64 = 1e-6;
/// The problem is declared infeasible once `Σλ` exceeds this.
pub const DIVERGENCE_CAP: f64 = 1e10;
const TAU: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QpSolution {
    pub lambda: Vec<f64>,
    /// `W(λ⁰)`.
    pub objective: f64,
    /// `ρ₀ = √(2 / W(λ⁰))`.
    pub margin: f64,
    pub support_vectors: usize,
    pub bias: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum QpOutcome {
    Solved(QpSolution),
    /// The dual diverges: no errorless separation in the feature space.
    Infeasible,
}

/// Default iteration budget for `n` points.
pub fn default_iteration_cap(n: usize) -> usize {
    100_000 + 200 * n
}

/// SMO with second-order working-set selection and no upper bound on the
/// multipliers. `kernel` is the Gram matrix `K`, labels are `±1`.
pub fn qp_hard_margin(kernel: &Matrix, y: &[f64], max_iter: usize) -> Result<QpOutcome> {
    let n = y.len();
    assert_eq!(kernel.nrows(), n);
    assert_eq!(kernel.ncols(), n);
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::InvalidArgument("both classes are needed".into()));
    }
    let q = |i: usize, j: usize| y[i] * y[j] * kernel[(i, j)];
    let mut lambda = vec![0.0; n];
    // gradient of ½λ'Dλ − λ'1
    let mut grad = vec![-1.0; n];
    let mut sum = 0.0;
    for iter in 0..max_iter {
        // i maximizes −y_t G_t over I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if y[t] > 0.0 || lambda[t] > 0.0 {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        // j minimizes the second-order gain over I_low
        let mut gmin = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            if y[t] < 0.0 || lambda[t] > 0.0 {
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                if i != usize::MAX && v < gmax {
                    let b = gmax - v;
                    let mut a = kernel[(i, i)] + kernel[(t, t)] - 2.0 * kernel[(i, t)];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let obj = -(b * b) / a;
                    if obj < best_obj {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        if gmax - gmin < KKT_TOLERANCE || j == usize::MAX {
            return Ok(QpOutcome::Solved(finish(kernel, y, lambda, &grad, iter)));
        }

        let (old_i, old_j) = (lambda[i], lambda[j]);
        if y[i] != y[j] {
            let mut a = kernel[(i, i)] + kernel[(j, j)] + 2.0 * q(i, j);
            if a <= 0.0 {
                a = TAU;
            }
            let delta = (-grad[i] - grad[j]) / a;
            let diff = lambda[i] - lambda[j];
            lambda[i] += delta;
            lambda[j] += delta;
            if diff > 0.0 {
                if lambda[j] < 0.0 {
                    lambda[j] = 0.0;
                    lambda[i] = diff;
                }
            } else if lambda[i] < 0.0 {
                lambda[i] = 0.0;
                lambda[j] = -diff;
            }
        } else {
            let mut a = kernel[(i, i)] + kernel[(j, j)] - 2.0 * kernel[(i, j)];
            if a <= 0.0 {
                a = TAU;
            }
            let delta = (grad[i] - grad[j]) / a;
            let s = lambda[i] + lambda[j];
            lambda[i] -= delta;
            lambda[j] += delta;
            if lambda[j] < 0.0 {
                lambda[j] = 0.0;
                lambda[i] = s;
            }
            if lambda[i] < 0.0 {
                lambda[i] = 0.0;
                lambda[j] = s;
            }
        }
        let (di, dj) = (lambda[i] - old_i, lambda[j] - old_j);
        for t in 0..n {
            grad[t] += q(t, i) * di + q(t, j) * dj;
        }
        sum += di + dj;
        if !sum.is_finite() || sum > DIVERGENCE_CAP {
            return Ok(QpOutcome::Infeasible);
        }
    }
    Err(Error::IterationCap(max_iter))
}

fn finish(kernel: &Matrix, y: &[f64], lambda: Vec<f64>, grad: &[f64], iterations: usize) -> QpSolution {
    let n = y.len();
    // grad = Dλ − 1, so λ'Dλ = λ'(grad + 1)
    let l1: f64 = lambda.iter().sum();
    let quad: f64 = lambda.iter().zip(grad).map(|(l, g)| l * (g + 1.0)).sum();
    let objective = l1 - 0.5 * quad;
    let sv: Vec<usize> = (0..n).filter(|&i| lambda[i] > 0.0).collect();
    let bias = if sv.is_empty() {
        0.0
    } else {
        sv.iter()
            .map(|&i| {
                let f: f64 = (0..n).map(|j| lambda[j] * y[j] * kernel[(j, i)]).sum();
                y[i] - f
            })
            .sum::<f64>()
            / sv.len() as f64
    };
    let margin = if objective > 0.0 {
        (2.0 / objective).sqrt()
    } else {
        0.0
    };
    QpSolution {
        lambda,
        objective,
        margin,
        support_vectors: sv.len(),
        bias,
        iterations,
    }
}

/// `K_ij = exp(−γ ‖x_i − x_j‖²)`.
pub fn gaussian_gram(points: &crate::data::Points, gamma: f64) -> Matrix {
    let n = points.len();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        k[(i, i)] = 1.0;
        for j in 0..i {
            let d: f64 = points
                .row(i)
                .iter()
                .zip(points.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let v = (-gamma * d).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}
