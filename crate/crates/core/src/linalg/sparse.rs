use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{Matrix, C64};

/// Row-compressed copy of a matrix, used to apply embedded gates cheaply.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_start: Vec<usize>,
    col_index: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn from_dense(m: &Matrix) -> Self {
        let mut row_start = Vec::with_capacity(m.rows() + 1);
        let mut col_index = Vec::new();
        let mut values = Vec::new();
        for i in 0..m.rows() {
            row_start.push(values.len());
            for j in 0..m.cols() {
                let z = m[(i, j)];
                if !z.is_zero() {
                    col_index.push(j);
                    values.push(z);
                }
            }
        }
        row_start.push(values.len());
        Self {
            rows: m.rows(),
            cols: m.cols(),
            row_start,
            col_index,
            values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `self * v`. Panics when `v.len() != self.cols()`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                (self.row_start[i]..self.row_start[i + 1])
                    .map(|k| self.values[k] * v[self.col_index[k]])
                    .sum()
            })
            .collect()
    }

    /// `self * m`. Panics on a shape mismatch.
    pub fn mul_dense(&self, m: &Matrix) -> Matrix {
        assert_eq!(m.rows(), self.cols, "shape mismatch");
        let oc = m.cols();
        let src = m.as_slice();
        let mut data = vec![C64::zero(); self.rows * oc];
        for i in 0..self.rows {
            let out = &mut data[i * oc..(i + 1) * oc];
            for k in self.row_start[i]..self.row_start[i + 1] {
                let a = self.values[k];
                let row = &src[self.col_index[k] * oc..(self.col_index[k] + 1) * oc];
                for (o, &b) in out.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Matrix::from_vec(self.rows, oc, data).expect("consistent shape")
    }

    /// `self * x * self^dagger`, computed as `self * (self * x^dagger)^dagger`.
    pub fn conjugate(&self, x: &Matrix) -> Matrix {
        let left = self.mul_dense(&x.adjoint());
        self.mul_dense(&left.adjoint())
    }
}
