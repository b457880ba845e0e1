use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{is_unitary, kron, Matrix, SparseMatrix, C64};

use super::{ModelError, Result};

/// Completely positive map given by Kraus operators.
///
/// Construction checks shapes only; trace preservation is reported by
/// [`QuantumChannel::tp_deviation`] and by model validation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<Matrix>,
    sparse: Vec<SparseMatrix>,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<Matrix>) -> Result<Self> {
        let first = kraus.first().ok_or(ModelError::EmptyChannel)?;
        let dim = first.rows();
        for k in &kraus {
            if !k.is_square() || k.rows() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: if k.rows() != dim { k.rows() } else { k.cols() },
                });
            }
            if !k.is_finite() {
                return Err(ModelError::NonFinite);
            }
        }
        let sparse = kraus.iter().map(SparseMatrix::from_dense).collect();
        Ok(Self { dim, kraus, sparse })
    }

    /// Conjugation by a single operator.
    pub fn unitary(u: Matrix) -> Result<Self> {
        Self::new(alloc::vec![u])
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(Matrix::identity(dim)).expect("identity is square")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[Matrix] {
        &self.kraus
    }

    pub fn kraus_count(&self) -> usize {
        self.kraus.len()
    }

    /// Applies the channel to an operator (not necessarily a state).
    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        if !x.is_square() || x.rows() != self.dim {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim,
                found: x.rows(),
            });
        }
        let mut terms = self.sparse.iter().map(|k| k.conjugate(x));
        let first = terms.next().expect("non-empty");
        Ok(terms.fold(first, |acc, t| &acc + &t))
    }

    /// Applies a single-Kraus channel to a state vector.
    pub(crate) fn apply_vector(&self, v: &[C64]) -> Option<Vec<C64>> {
        (self.sparse.len() == 1).then(|| self.sparse[0].apply(v))
    }

    /// `||sum_j K_j^dagger K_j - I||_F`.
    pub fn tp_deviation(&self) -> f64 {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for k in &self.kraus {
            acc = &acc + &k.adjoint().matmul(k).expect("square");
        }
        acc.distance(&Matrix::identity(self.dim))
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &QuantumChannel) -> Result<QuantumChannel> {
        if self.dim != first.dim {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim,
                found: first.dim,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                kraus.push(a.matmul(b)?);
            }
        }
        Self::new(kraus)
    }

    /// Row-major vectorized superoperator `sum_j K_j (x) conj(K_j)`.
    pub fn superoperator(&self) -> Matrix {
        let mut kraus = self.kraus.iter();
        let k0 = kraus.next().expect("non-empty");
        kraus.fold(kron(k0, &k0.conj()), |acc, k| &acc + &kron(k, &k.conj()))
    }

    /// `U Lambda(U^dagger . U) U^dagger`.
    pub fn conjugated_by(&self, u: &Matrix) -> Result<QuantumChannel> {
        let ud = u.adjoint();
        let kraus = self
            .kraus
            .iter()
            .map(|k| u.matmul(k)?.matmul(&ud))
            .collect::<core::result::Result<Vec<_>, _>>()?;
        Self::new(kraus)
    }

    /// Entrywise complex conjugate of every Kraus operator.
    pub fn complex_conjugate(&self) -> QuantumChannel {
        Self::new(self.kraus.iter().map(Matrix::conj).collect()).expect("same shapes")
    }

    /// The unitary implemented by this channel, if every Kraus operator is
    /// proportional to one unitary within `tol`.
    pub fn as_unitary(&self, tol: f64) -> Option<Matrix> {
        let d = self.dim as f64;
        let lead = self
            .kraus
            .iter()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))?;
        let norm = lead.frobenius_norm();
        if norm == 0.0 {
            return None;
        }
        let u = lead.scale_re(d.sqrt() / norm);
        if !is_unitary(&u, tol * d.sqrt()) {
            return None;
        }
        for k in &self.kraus {
            let c = u.trace_product(&k.adjoint()).conj() / d;
            if k.distance(&u.scale(c)) > tol {
                return None;
            }
        }
        if self.tp_deviation() > tol * d.sqrt() {
            return None;
        }
        Some(u)
    }
}
