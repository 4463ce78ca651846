//! Minimal dense Cholesky factorization. Quadratic forms are evaluated by
//! triangular solve; the inverse is never formed.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Lower-triangular factor L with A = L L^T.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Array2<f64>,
    dim: usize,
}

pub fn cholesky(a: ArrayView2<'_, f64>) -> Result<Cholesky> {
    let dim = a.nrows();
    assert_eq!(dim, a.ncols(), "cholesky needs a square matrix");
    let mut l = Array2::<f64>::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if !(sum > 0.0) || !sum.is_finite() {
                    return Err(Error::NotPositiveDefinite {
                        index: i,
                        pivot: sum,
                    });
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Ok(Cholesky { l, dim })
}

impl Cholesky {
    /// log |A| = 2 sum_i log L_ii.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.l[[i, i]].ln()).sum::<f64>()
    }

    /// Solves L y = b by forward substitution.
    pub fn solve_lower(&self, b: ArrayView1<'_, f64>, y: &mut [f64]) {
        debug_assert_eq!(b.len(), self.dim);
        for i in 0..self.dim {
            let mut v = b[i];
            for k in 0..i {
                v -= self.l[[i, k]] * y[k];
            }
            y[i] = v / self.l[[i, i]];
        }
    }

    /// (x)^T A^{-1} (x) for A = L L^T, via one forward solve.
    pub fn quad_form(&self, diff: ArrayView1<'_, f64>, scratch: &mut [f64]) -> f64 {
        self.solve_lower(diff, scratch);
        scratch.iter().map(|v| v * v).sum()
    }
}
