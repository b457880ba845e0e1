use alloc::format;

use rand::Rng;

use crate::linalg::{kron, DimsLayout, Matrix};
use crate::model::QuantumChannel;
use crate::random::{random_density_matrix, random_pure_state};

use super::blocks::{bipartite, check_orthonormal};
use super::channels::purity;
use super::{AnalysisError, Result};

const ONB_TOL: f64 = 1e-8;
const PURITY_SLACK: f64 = 1e-9;
const OVERLAP_FLOOR: f64 = 1e-6;
const IMAGE_OVERLAP_FLOOR: f64 = 1e-12;

/// Checks that a channel mapping the orthonormal columns of `onb` to an
/// orthonormal set never increases purity, on `trials` random states (half
/// pure, half full rank).
pub fn purity_nonincrease_check<R: Rng + ?Sized>(
    ch: &QuantumChannel,
    onb: &Matrix,
    trials: usize,
    rng: &mut R,
) -> Result<bool> {
    let d = ch.dim();
    check_orthonormal(onb, d, ONB_TOL)?;
    let images = onb
        .columns()
        .iter()
        .map(|v| ch.apply(&Matrix::projector(v)))
        .collect::<core::result::Result<alloc::vec::Vec<_>, _>>()?;
    for (i, a) in images.iter().enumerate() {
        let p = purity(a);
        if p < 1.0 - ONB_TOL {
            return Err(AnalysisError::Precondition(format!(
                "image of basis vector {i} has purity {p}"
            )));
        }
        for (j, b) in images.iter().enumerate().skip(i + 1) {
            let overlap = a.trace_product(b).re;
            if overlap > ONB_TOL {
                return Err(AnalysisError::Precondition(format!(
                    "images of basis vectors {i} and {j} overlap ({overlap:e})"
                )));
            }
        }
    }
    for t in 0..trials {
        let rho = if t % 2 == 0 {
            Matrix::projector(&random_pure_state(d, rng))
        } else {
            random_density_matrix(d, rng)
        };
        if purity(&ch.apply(&rho)?) > purity(&rho) + PURITY_SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches for a pair of non-orthogonal pure inputs with orthogonal
/// outputs; true when none of `trials` random pairs is one.
pub fn orthogonality_check<R: Rng + ?Sized>(
    ch: &QuantumChannel,
    trials: usize,
    rng: &mut R,
) -> bool {
    let d = ch.dim();
    for _ in 0..trials {
        let rho = Matrix::projector(&random_pure_state(d, rng));
        let sigma = Matrix::projector(&random_pure_state(d, rng));
        if rho.trace_product(&sigma).re <= OVERLAP_FLOOR {
            continue;
        }
        let (a, b) = match (ch.apply(&rho), ch.apply(&sigma)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return false,
        };
        if a.trace_product(&b).re <= IMAGE_OVERLAP_FLOOR {
            return false;
        }
    }
    true
}

/// Smallest outcome probability `tr[(psi_i (x) phi_l) ch(rho_a (x) phi_0)]`
/// over all `l` and over the `i` with `tr[psi_i rho_a] > min_weight`, where
/// `psi_i` and `phi_l` are the columns of `basis_a` and `basis_b`.
pub fn support_propagation_min(
    ch: &QuantumChannel,
    layout: &DimsLayout,
    basis_a: &Matrix,
    basis_b: &Matrix,
    rho_a: &Matrix,
    min_weight: f64,
) -> Result<f64> {
    let (da, db) = bipartite(ch, layout)?;
    check_orthonormal(basis_a, da, ONB_TOL)?;
    check_orthonormal(basis_b, db, ONB_TOL)?;
    let phi: alloc::vec::Vec<_> = basis_b.columns();
    let out = ch.apply(&kron(rho_a, &Matrix::projector(&phi[0])))?;
    let mut min = f64::INFINITY;
    for psi in basis_a.columns() {
        let pa = Matrix::projector(&psi);
        if pa.trace_product(rho_a).re <= min_weight {
            continue;
        }
        for f in &phi {
            let p = kron(&pa, &Matrix::projector(f)).trace_product(&out).re;
            min = min.min(p);
        }
    }
    Ok(min)
}
