//! Cyclic Jacobi eigen-solver for small dense symmetric matrices.
//!
//! The moment matrices handled here are at most `(N/2 + 1)`-dimensional, so a
//! plain sweep over all off-diagonal pairs is both the simplest and the most
//! accurate option. Each rotation annihilates one off-diagonal element;
//! accumulating the rotations gives the eigenvectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Sweeps stop once the off-diagonal Frobenius norm falls below this,
/// relative to `max(1, ‖A‖_F)`.
pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-14;

pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) Vᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub dim: usize,
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Row-major `dim × dim`; column `j` is the unit eigenvector of
    /// `values[j]`.
    pub vectors: Vec<f64>,
}

impl SymmetricEigen {
    pub fn vector(&self, j: usize) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.vectors[i * self.dim + j])
            .collect()
    }
}

/// Full decomposition of the symmetric row-major matrix `matrix`.
///
/// Only the upper triangle is trusted; the lower one is overwritten by its
/// mirror before iterating.
pub fn symmetric_eigen(matrix: &[f64], dim: usize) -> Result<SymmetricEigen> {
    if matrix.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: matrix.len(),
        });
    }
    let n = dim;
    let mut a = matrix.to_vec();
    for i in 0..n {
        for j in 0..i {
            a[i * n + j] = a[j * n + i];
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = frobenius(&a).max(1.0);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal(&a, n) < OFF_DIAGONAL_TOLERANCE * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged && off_diagonal(&a, n) >= OFF_DIAGONAL_TOLERANCE * scale {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        // fix the sign so the largest component is positive
        let pivot = (0..n)
            .max_by(|&i, &j| v[i * n + src].abs().total_cmp(&v[j * n + src].abs()))
            .unwrap_or(0);
        let sign = if v[pivot * n + src] < 0.0 { -1.0 } else { 1.0 };
        for row in 0..n {
            vectors[row * n + col] = sign * v[row * n + src];
        }
    }
    Ok(SymmetricEigen {
        dim: n,
        values,
        vectors,
    })
}

/// Smallest eigenvalue and its unit eigenvector.
pub fn min_eigenpair(matrix: &[f64], dim: usize) -> Result<(f64, Vec<f64>)> {
    let eig = symmetric_eigen(matrix, dim)?;
    Ok((eig.values[0], eig.vector(0)))
}

/// Apply the rotation in the `(p, q)` plane that zeroes `a[p][q]`.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta.is_finite() {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + math::sqrt(theta * theta + 1.0))
    } else {
        0.0
    };
    let c = 1.0 / math::sqrt(t * t + 1.0);
    let s = t * c;

    for k in 0..n {
        let (akp, akq) = (a[k * n + p], a[k * n + q]);
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[p * n + k], a[q * n + k]);
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

fn frobenius(a: &[f64]) -> f64 {
    math::sqrt(a.iter().map(|x| x * x).sum())
}

fn off_diagonal(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    math::sqrt(s)
}

/// `‖M x - λ x‖₂`.
pub fn residual(matrix: &[f64], dim: usize, value: f64, vector: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        let mx: f64 = (0..dim).map(|j| matrix[i * dim + j] * vector[j]).sum();
        let r = mx - value * vector[i];
        s += r * r;
    }
    math::sqrt(s)
}
