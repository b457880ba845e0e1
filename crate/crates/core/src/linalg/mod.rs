//! Dense complex linear algebra on small Hilbert spaces.
//!
//! Matrices are row-major [`Matrix`] values over [`C64`]. Tensor products,
//! partial traces, a Hermitian Jacobi eigensolver and sparse operator
//! application cover everything the models and analysis layers need.

mod eig;
mod matrix;
mod sparse;
mod tensor;

pub use eig::{hermitian_eig, unitary_eig, Eigen, UnitaryEigen};
pub use matrix::{
    c64, inner, is_unitary, normalize, phase_aligned_distance, vec_norm, Matrix, C64,
};
pub use sparse::SparseMatrix;
pub use tensor::{embed, kron, kron_all, kron_vec, partial_trace, reorder_subsystems, DimsLayout};

use thiserror::Error;

/// Errors raised by linear-algebra routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not normal (deviation {deviation:e})")]
    NotNormal { deviation: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(&'static str),
    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },
    #[error("subsystem {0} listed more than once")]
    DuplicateSubsystem(usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

pub type Result<T> = core::result::Result<T, LinalgError>;
