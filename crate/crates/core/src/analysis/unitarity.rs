use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::ComplexFloat;

use crate::linalg::{kron, partial_trace, unitary_eig, DimsLayout, Matrix, C64};
use crate::model::QuantumChannel;

use super::blocks::{bipartite, check_orthonormal};
use super::channels::{matrix_unit, purity};
use super::coherence::coherence_graph;
use super::{kraus_block_structure, AnalysisError, Result, PURE_THRESHOLD};

/// Coherences below this size do not link two basis vectors.
const COHERENCE_FLOOR: f64 = 1e-8;

/// A unitary `sum_i e^{i theta_i} psi_i (x) U_i` rebuilt from its blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryReconstruction {
    pub unitary: Matrix,
    /// `theta_i` for every basis vector, with `theta_0 = 0`.
    pub phases: Vec<f64>,
}

fn purity_threshold(tol: f64) -> f64 {
    PURE_THRESHOLD.min(1.0 - tol)
}

/// Rebuilds the unitary of a bipartite channel whose restrictions to the
/// basis vectors `psi_i` of the first subsystem are the unitaries
/// `sub_unitaries[i]` on the second.
///
/// Condition (i) asks `ch(psi_i (x) rho) = psi_i (x) U_i rho U_i^dagger`,
/// checked on matrix units. Condition (ii) asks that the first-subsystem
/// marginals of `coherent_inputs` connect the basis and that their images
/// are pure. The relative phases come from the overlaps of the Kraus
/// coefficient vectors along a spanning tree of the coherence graph.
pub fn reconstruct_unitary_from_subchannels(
    ch: &QuantumChannel,
    layout: &DimsLayout,
    basis_on_a: &Matrix,
    sub_unitaries: &[Matrix],
    coherent_inputs: &[Matrix],
    tol: f64,
) -> Result<UnitaryReconstruction> {
    let (da, db) = bipartite(ch, layout)?;
    check_orthonormal(basis_on_a, da, tol)?;
    if sub_unitaries.len() != da || sub_unitaries.iter().any(|u| u.rows() != db || !u.is_square()) {
        return Err(AnalysisError::LayoutMismatch(format!(
            "need {da} unitaries of dimension {db}"
        )));
    }
    let basis = basis_on_a.columns();
    let check_tol = tol.max(1e-9);
    for (i, (psi, u)) in basis.iter().zip(sub_unitaries).enumerate() {
        let proj = Matrix::projector(psi);
        for b in 0..db {
            for c in 0..db {
                let e = matrix_unit(db, b, c);
                let got = ch.apply(&kron(&proj, &e))?;
                let want = kron(&proj, &u.conjugate(&e)?);
                let dev = got.distance(&want);
                if dev > check_tol {
                    return Err(AnalysisError::ConditionI(format!(
                        "block {i} deviates by {dev:e} on |{b}><{c}|"
                    )));
                }
            }
        }
    }

    let blocks = kraus_block_structure(ch, layout, basis_on_a, check_tol)?;
    // lambda[i][j] = tr(U_i^dagger K_j^i) / d_B
    let lambda: Vec<Vec<C64>> = (0..da)
        .map(|i| {
            blocks
                .blocks
                .iter()
                .map(|row| sub_unitaries[i].adjoint().trace_product(&row[i]) / db as f64)
                .collect()
        })
        .collect();
    for (j, row) in blocks.blocks.iter().enumerate() {
        for i in 0..da {
            let dev = row[i].distance(&sub_unitaries[i].scale(lambda[i][j]));
            if dev > check_tol.sqrt() {
                return Err(AnalysisError::ConditionI(format!(
                    "Kraus block ({j}, {i}) is not proportional to its unitary ({dev:e})"
                )));
            }
        }
    }

    let marginals = coherent_inputs
        .iter()
        .map(|rho| partial_trace(rho, layout, &[0]))
        .collect::<core::result::Result<Vec<_>, _>>()?;
    let graph = coherence_graph(basis_on_a, &marginals, COHERENCE_FLOOR)?;
    if !graph.is_connected() {
        return Err(AnalysisError::ConditionII(
            "coherence graph of the inputs is disconnected".into(),
        ));
    }
    let threshold = purity_threshold(tol);
    for (k, rho) in coherent_inputs.iter().enumerate() {
        let p = purity(&ch.apply(rho)?);
        if p < threshold {
            return Err(AnalysisError::ConditionII(format!(
                "image of coherent input {k} has purity {p}"
            )));
        }
    }

    let mut phases = vec![0.0; da];
    for (k, l) in graph.spanning_tree() {
        let overlap: C64 = lambda[k]
            .iter()
            .zip(&lambda[l])
            .map(|(a, b)| a.conj() * b)
            .sum();
        if overlap.abs() < 1.0 - check_tol.sqrt() {
            return Err(AnalysisError::ConditionII(format!(
                "coefficient vectors of blocks {k} and {l} are not parallel (overlap {:.9})",
                overlap.abs()
            )));
        }
        phases[l] = phases[k] + overlap.arg();
    }

    let mut unitary = Matrix::zeros(da * db, da * db);
    for (i, psi) in basis.iter().enumerate() {
        let term = kron(&Matrix::projector(psi), &sub_unitaries[i])
            .scale(C64::from_polar(1.0, phases[i]));
        unitary = &unitary + &term;
    }
    let distance = ch
        .superoperator()
        .distance(&QuantumChannel::unitary(unitary.clone())?.superoperator());
    if distance > 10.0 * check_tol {
        return Err(AnalysisError::ConditionII(format!(
            "rebuilt unitary misses the channel by {distance:e}"
        )));
    }
    Ok(UnitaryReconstruction { unitary, phases })
}

/// Decides whether `ch` is conjugation by `u`, using the eigenbasis of `u`.
///
/// See [`check_channel_equals_unitary_in_basis`].
pub fn check_channel_equals_unitary(
    ch: &QuantumChannel,
    u: &Matrix,
    coherent_inputs: &[Matrix],
    tol: f64,
) -> Result<bool> {
    let eig = unitary_eig(u, 1e-9)?;
    check_channel_equals_unitary_in_basis(ch, u, &eig.vectors, coherent_inputs, tol)
}

/// Decides whether `ch` is conjugation by `u`, given an eigenbasis of `u`.
///
/// The channel must fix every eigenvector projector, and the coherent
/// inputs must be pure with a connected coherence graph in the eigenbasis;
/// otherwise a precondition error is returned. The channel is first
/// compared with `u` on the coherent inputs, then on a full operator basis,
/// both within `10 tol`.
pub fn check_channel_equals_unitary_in_basis(
    ch: &QuantumChannel,
    u: &Matrix,
    eigenbasis: &Matrix,
    coherent_inputs: &[Matrix],
    tol: f64,
) -> Result<bool> {
    let d = ch.dim();
    if u.rows() != d || !u.is_square() {
        return Err(AnalysisError::LayoutMismatch(format!(
            "unitary of dimension {} for a channel of dimension {d}",
            u.rows()
        )));
    }
    check_orthonormal(eigenbasis, d, tol)?;
    let check_tol = tol.max(1e-9);
    for (k, v) in eigenbasis.columns().iter().enumerate() {
        let uv = u.mat_vec(v)?;
        let lambda: C64 = v.iter().zip(&uv).map(|(a, b)| a.conj() * b).sum();
        let residual: f64 = uv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > 1e-7 {
            return Err(AnalysisError::Precondition(format!(
                "basis vector {k} is not an eigenvector of u ({residual:e})"
            )));
        }
        let proj = Matrix::projector(v);
        let dev = ch.apply(&proj)?.distance(&proj);
        if dev > check_tol {
            return Err(AnalysisError::Precondition(format!(
                "channel moves eigenprojector {k} by {dev:e}"
            )));
        }
    }
    for (k, rho) in coherent_inputs.iter().enumerate() {
        let p = purity(rho);
        if p < PURE_THRESHOLD {
            return Err(AnalysisError::Precondition(format!(
                "coherent input {k} has purity {p}"
            )));
        }
    }
    let graph = coherence_graph(eigenbasis, coherent_inputs, COHERENCE_FLOOR)?;
    if !graph.is_connected() {
        return Err(AnalysisError::Precondition(
            "coherent inputs leave the eigenbasis disconnected".into(),
        ));
    }
    for rho in coherent_inputs {
        if ch.apply(rho)?.distance(&u.conjugate(rho)?) > 10.0 * check_tol {
            return Ok(false);
        }
    }
    let target = QuantumChannel::unitary(u.clone())?.superoperator();
    Ok(ch.superoperator().distance(&target) <= 10.0 * check_tol)
}
