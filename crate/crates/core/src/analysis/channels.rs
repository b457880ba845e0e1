use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{hermitian_eig, Matrix};

use super::Result;

/// Matrix unit `|k><l|` of dimension `d`.
pub(crate) fn matrix_unit(d: usize, k: usize, l: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    m[(k, l)] = crate::linalg::c64(1.0, 0.0);
    m
}

/// Row-major vectorized superoperator of a linear map on `d x d` matrices:
/// entry `[(m, n), (k, l)]` is `map(|k><l|)[m][n]`.
pub fn superoperator_of_map(
    d: usize,
    mut map: impl FnMut(&Matrix) -> Result<Matrix>,
) -> Result<Matrix> {
    let dout_probe = map(&matrix_unit(d, 0, 0))?;
    let dout = dout_probe.rows();
    let mut s = Matrix::zeros(dout * dout, d * d);
    for k in 0..d {
        for l in 0..d {
            let img = if k == 0 && l == 0 {
                dout_probe.clone()
            } else {
                map(&matrix_unit(d, k, l))?
            };
            for m in 0..dout {
                for n in 0..dout {
                    s[(m * dout + n, k * d + l)] = img[(m, n)];
                }
            }
        }
    }
    Ok(s)
}

/// Choi matrix `sum_{kl} |k><l| (x) map(|k><l|)`.
pub fn choi_matrix(d: usize, mut map: impl FnMut(&Matrix) -> Result<Matrix>) -> Result<Matrix> {
    let mut blocks = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            blocks.push(map(&matrix_unit(d, k, l))?);
        }
    }
    let dout = blocks[0].rows();
    Ok(Matrix::from_fn(d * dout, d * dout, |r, c| {
        let (k, i) = (r / dout, r % dout);
        let (l, j) = (c / dout, c % dout);
        blocks[k * d + l][(i, j)]
    }))
}

/// Kraus operators `sqrt(lambda) unvec(v)` from the eigendecomposition of a
/// Choi matrix, dropping eigenvalues below `cutoff` times the trace.
pub fn kraus_from_choi(choi: &Matrix, d_in: usize, cutoff: f64) -> Result<Vec<Matrix>> {
    let d_out = choi.rows() / d_in;
    let eig = hermitian_eig(choi, 1e-8 * (1.0 + choi.frobenius_norm()))?;
    let tr: f64 = eig.values.iter().sum();
    let mut kraus = Vec::new();
    for (idx, &lambda) in eig.values.iter().enumerate().rev() {
        if lambda <= cutoff * tr.max(1.0) {
            continue;
        }
        let scale = lambda.sqrt();
        kraus.push(Matrix::from_fn(d_out, d_in, |i, k| {
            eig.vectors[(k * d_out + i, idx)] * scale
        }));
    }
    Ok(kraus)
}

/// `tr(rho^2)` for a Hermitian `rho`.
pub fn purity(rho: &Matrix) -> f64 {
    rho.trace_product(rho).re
}
