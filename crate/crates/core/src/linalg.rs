//! Small dense linear algebra: symmetric matrices stored row-major and a
//! Cholesky solver with a condition-number guard.
//!
//! Feature dimensions in this crate are tiny (a handful of coordinates), so a
//! direct `LL^T` factorization is both the fastest and the most transparent
//! route to the normal-equation solves used by the least-squares learner.

use alloc::vec::Vec;
use thiserror::Error;

/// Solves with an estimated condition number above this raise
/// [`LinalgError::Singular`].
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular or ill-conditioned (estimated condition number {cond:.3e})")]
    Singular { cond: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A dense symmetric `dim x dim` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Builds from row-major data; the caller is responsible for symmetry.
    pub fn from_rows(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row data must be dim*dim");
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    /// Adds `value` to entries (i, j) and (j, i).
    pub fn add_symmetric(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] += value;
        if i != j {
            self.data[j * self.dim + i] += value;
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Computes the quadratic form `v^T M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        assert_eq!(v.len(), self.dim, "vector length must match dimension");
        let mut total = 0.0;
        for (i, vi) in v.iter().enumerate() {
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            total += vi * dot(row, v);
        }
        total
    }

    /// Matrix-vector product `M v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim, "vector length must match dimension");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Solves `M x = b` for symmetric positive definite `M` via Cholesky.
    ///
    /// The condition number is estimated from the squared ratio of the largest
    /// to the smallest Cholesky pivot; estimates above [`CONDITION_LIMIT`]
    /// (and non-positive pivots) are reported as singular.
    pub fn solve_spd(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if b.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                got: b.len(),
            });
        }
        let chol = self.cholesky()?;
        Ok(chol.solve(b))
    }

    /// Lower-triangular Cholesky factor with the condition guard applied.
    pub fn cholesky(&self) -> Result<Cholesky, LinalgError> {
        let n = self.dim;
        let mut l = vec![0.0; n * n];
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0_f64;
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(LinalgError::Singular { cond: f64::INFINITY });
                    }
                    let pivot = libm::sqrt(sum);
                    min_pivot = min_pivot.min(pivot);
                    max_pivot = max_pivot.max(pivot);
                    l[i * n + j] = pivot;
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        let ratio = max_pivot / min_pivot;
        let cond = ratio * ratio;
        if cond > CONDITION_LIMIT {
            return Err(LinalgError::Singular { cond });
        }
        Ok(Cholesky { dim: n, l })
    }
}

/// Lower-triangular factor `L` with `M = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Solves `L L^T x = b` by forward and backward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= self.l[i * n + k] * y[k];
            }
            y[i] /= self.l[i * n + i];
        }
        let mut x = y;
        for i in (0..n).rev() {
            for k in i + 1..n {
                x[i] -= self.l[k * n + i] * x[k];
            }
            x[i] /= self.l[i * n + i];
        }
        x
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

/// Cosine similarity; zero-norm inputs yield 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}
