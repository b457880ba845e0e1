use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{kron, partial_trace, DimsLayout, Matrix, C64};
use crate::model::QuantumChannel;

use super::subchannel::subchannel;
use super::{AnalysisError, Result};

/// Kraus operators in block form `K_j = sum_i psi_i (x) K_j^i`, with
/// `psi_i` the projectors onto an orthonormal basis of the first subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockKraus {
    /// Basis vectors on the first subsystem, as columns.
    pub basis: Matrix,
    /// `blocks[j][i]` is `K_j^i`, acting on the second subsystem.
    pub blocks: Vec<Vec<Matrix>>,
}

impl BlockKraus {
    /// `sum_i |psi_i><psi_i| (x) K_j^i` for every `j`.
    pub fn reassemble(&self) -> Vec<Matrix> {
        self.blocks
            .iter()
            .map(|row| {
                let mut acc: Option<Matrix> = None;
                for (i, k) in row.iter().enumerate() {
                    let term = kron(&Matrix::projector(&self.basis.column(i)), k);
                    acc = Some(match acc {
                        Some(a) => &a + &term,
                        None => term,
                    });
                }
                acc.expect("non-empty basis")
            })
            .collect()
    }

    pub fn to_channel(&self) -> Result<QuantumChannel> {
        Ok(QuantumChannel::new(self.reassemble())?)
    }

    /// The channel `sum_j K_j^i . K_j^i^dagger` on the second subsystem.
    pub fn block_channel(&self, i: usize) -> Result<QuantumChannel> {
        Ok(QuantumChannel::new(
            self.blocks.iter().map(|row| row[i].clone()).collect(),
        )?)
    }
}

pub(crate) fn bipartite(ch: &QuantumChannel, layout: &DimsLayout) -> Result<(usize, usize)> {
    if layout.len() != 2 || layout.total() != ch.dim() {
        return Err(AnalysisError::LayoutMismatch(format!(
            "need a bipartite layout of dimension {}",
            ch.dim()
        )));
    }
    Ok((layout.factors()[0], layout.factors()[1]))
}

pub(crate) fn check_orthonormal(basis: &Matrix, d: usize, tol: f64) -> Result<()> {
    if basis.rows() != d || basis.cols() != d {
        return Err(AnalysisError::LayoutMismatch(format!(
            "basis of shape {}x{} on a subsystem of dimension {d}",
            basis.rows(),
            basis.cols()
        )));
    }
    let deviation = basis
        .adjoint()
        .matmul(basis)?
        .distance(&Matrix::identity(d));
    if deviation > tol.max(1e-9) {
        return Err(AnalysisError::NonOrthonormalBasis { deviation });
    }
    Ok(())
}

/// `(<psi| (x) I) K (|psi> (x) I)`.
fn compress(k: &Matrix, psi: &[C64], db: usize) -> Matrix {
    let da = psi.len();
    Matrix::from_fn(db, db, |p, q| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..da {
            if psi[a].re == 0.0 && psi[a].im == 0.0 {
                continue;
            }
            for b in 0..da {
                acc += psi[a].conj() * k[(a * db + p, b * db + q)] * psi[b];
            }
        }
        acc
    })
}

/// Splits a bipartite channel into blocks over `basis_on_a`.
///
/// Membership is checked first: for every basis vector `psi_i` and every
/// computational anchor `|b>` on the second subsystem, the first-subsystem
/// marginal of `ch(psi_i (x) |b><b|)` must be `psi_i` within `tol`. The
/// Kraus operators are then compressed onto each block and the off-block
/// residual is checked.
pub fn kraus_block_structure(
    ch: &QuantumChannel,
    layout: &DimsLayout,
    basis_on_a: &Matrix,
    tol: f64,
) -> Result<BlockKraus> {
    let (da, db) = bipartite(ch, layout)?;
    check_orthonormal(basis_on_a, da, tol)?;
    let basis: Vec<Vec<C64>> = basis_on_a.columns();
    for (i, psi) in basis.iter().enumerate() {
        let proj = Matrix::projector(psi);
        for b in 0..db {
            let mut anchor = Matrix::zeros(db, db);
            anchor[(b, b)] = C64::new(1.0, 0.0);
            let out = ch.apply(&kron(&proj, &anchor))?;
            let marginal = partial_trace(&out, layout, &[0])?;
            let deviation = marginal.distance(&proj);
            if deviation > tol {
                return Err(AnalysisError::Membership {
                    basis_index: i,
                    anchor_index: b,
                    deviation,
                });
            }
        }
    }
    let blocks: Vec<Vec<Matrix>> = ch
        .kraus()
        .iter()
        .map(|k| basis.iter().map(|psi| compress(k, psi, db)).collect())
        .collect();
    let result = BlockKraus {
        basis: basis_on_a.clone(),
        blocks,
    };
    let residual = result
        .reassemble()
        .iter()
        .zip(ch.kraus())
        .map(|(a, k)| a.distance(k))
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(AnalysisError::OffBlock { residual });
    }
    Ok(result)
}

/// Checks that restricting to each `psi_i` commutes with composition:
/// the subchannel of `ch1 after ch2` on the second subsystem equals the
/// composition of the subchannels, within `tol` as superoperators.
pub fn subchannel_homomorphism_check(
    ch1: &QuantumChannel,
    ch2: &QuantumChannel,
    layout: &DimsLayout,
    basis_on_a: &Matrix,
    tol: f64,
) -> Result<bool> {
    kraus_block_structure(ch1, layout, basis_on_a, tol)?;
    kraus_block_structure(ch2, layout, basis_on_a, tol)?;
    let composed = ch1.compose(ch2)?;
    for psi in basis_on_a.columns() {
        let anchor = Matrix::projector(&psi);
        let whole = subchannel(&composed, layout, 1, &anchor)?.superoperator()?;
        let s1 = subchannel(ch1, layout, 1, &anchor)?.superoperator()?;
        let s2 = subchannel(ch2, layout, 1, &anchor)?.superoperator()?;
        if whole.distance(&s1.matmul(&s2)?) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
