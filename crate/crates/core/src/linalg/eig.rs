use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{c64, LinalgError, Matrix, Result, C64};

const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues of `(u + u^dagger)/2` closer than this are treated as one
/// cluster and split using the anti-Hermitian part.
const CLUSTER_TOL: f64 = 1e-7;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

/// Eigendecomposition of a normal (typically unitary) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryEigen {
    pub values: Vec<C64>,
    pub vectors: Matrix,
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
///
/// `tol` bounds the accepted Hermiticity deviation of the input; iteration
/// stops once the off-diagonal Frobenius norm is below `1e-12` relative to
/// the matrix norm.
pub fn hermitian_eig(m: &Matrix, tol: f64) -> Result<Eigen> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(LinalgError::NotHermitian { deviation });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();
    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off_diagonal_norm(&a) <= JACOBI_TOL * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > JACOBI_TOL * scale {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Eigen { values, vectors })
}

/// Applies the Jacobi rotation that zeroes `a[p][q]`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = apq / mag;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;
    // A <- A G and V <- V G.
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c + akq * gqp;
        a[(k, q)] = akp * s + akq * gqq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c + vkq * gqp;
        v[(k, q)] = vkp * s + vkq * gqq;
    }
    // A <- G^dagger A.
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c + aqk * gqp.conj();
        a[(q, k)] = apk * s + aqk * gqq.conj();
    }
    a[(p, q)] = c64(0.0, 0.0);
    a[(q, p)] = c64(0.0, 0.0);
    a[(p, p)] = c64(a[(p, p)].re, 0.0);
    a[(q, q)] = c64(a[(q, q)].re, 0.0);
}

/// Eigendecomposition of a normal matrix.
///
/// The Hermitian part is diagonalized first; clusters of equal eigenvalues
/// are then split by diagonalizing the anti-Hermitian part restricted to
/// each cluster. `tol` bounds the accepted normality deviation.
pub fn unitary_eig(u: &Matrix, tol: f64) -> Result<UnitaryEigen> {
    if !u.is_square() {
        return Err(LinalgError::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let n = u.rows();
    let ud = u.adjoint();
    let comm = &u.matmul(&ud)? - &ud.matmul(u)?;
    let deviation = comm.frobenius_norm();
    if deviation > tol.max(1e-9) * (1.0 + u.norm_sqr()) {
        return Err(LinalgError::NotNormal { deviation });
    }
    let re_part = u.hermitian_part();
    let im_part = Matrix::from_fn(n, n, |i, j| (u[(i, j)] - u[(j, i)].conj()) * c64(0.0, -0.5));
    let first = hermitian_eig(&re_part, f64::INFINITY)?;
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (first.values[end] - first.values[start]).abs() < CLUSTER_TOL {
            end += 1;
        }
        let block: Vec<Vec<C64>> = (start..end).map(|j| first.vectors.column(j)).collect();
        if block.len() == 1 {
            columns.extend(block);
        } else {
            let q = Matrix::from_columns(&block);
            let restricted = q.adjoint().matmul(&im_part)?.matmul(&q)?;
            let inner = hermitian_eig(&restricted, f64::INFINITY)?;
            let rotated = q.matmul(&inner.vectors)?;
            columns.extend(rotated.columns());
        }
        start = end;
    }
    let vectors = Matrix::from_columns(&columns);
    let values = columns
        .iter()
        .map(|col| {
            let uc = u.mat_vec(col).expect("square");
            super::inner(col, &uc)
        })
        .collect();
    Ok(UnitaryEigen { values, vectors })
}
