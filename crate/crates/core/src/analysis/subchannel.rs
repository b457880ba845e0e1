use alloc::format;
use alloc::vec::Vec;

use crate::linalg::{hermitian_eig, kron, partial_trace, reorder_subsystems, DimsLayout, Matrix};
use crate::model::QuantumChannel;

use super::channels::{choi_matrix, kraus_from_choi, superoperator_of_map};
use super::{AnalysisError, Result};

const CPTP_TOL: f64 = 1e-9;

/// Channel induced on one subsystem by fixing the state of the others:
/// `sigma -> tr_rest[ch(sigma (x) anchor)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subchannel {
    layout: DimsLayout,
    keep: usize,
    anchor: Matrix,
    parent: QuantumChannel,
}

/// Builds the subchannel of `ch` on subsystem `keep`, with `anchor` the
/// state of the remaining subsystems in layout order. Trace preservation and
/// complete positivity are checked on the matrix units.
pub fn subchannel(
    ch: &QuantumChannel,
    layout: &DimsLayout,
    keep: usize,
    anchor: &Matrix,
) -> Result<Subchannel> {
    if layout.total() != ch.dim() {
        return Err(AnalysisError::LayoutMismatch(format!(
            "layout of dimension {} for a channel of dimension {}",
            layout.total(),
            ch.dim()
        )));
    }
    if keep >= layout.len() {
        return Err(AnalysisError::LayoutMismatch(format!(
            "subsystem {keep} out of range"
        )));
    }
    let rest = layout.total() / layout.factors()[keep];
    if anchor.rows() != rest || !anchor.is_square() {
        return Err(AnalysisError::LayoutMismatch(format!(
            "anchor of dimension {} for a complement of dimension {rest}",
            anchor.rows()
        )));
    }
    check_state(anchor)?;
    let sub = Subchannel {
        layout: layout.clone(),
        keep,
        anchor: anchor.clone(),
        parent: ch.clone(),
    };
    sub.check_cptp()?;
    Ok(sub)
}

fn check_state(rho: &Matrix) -> Result<()> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > CPTP_TOL || tr.im.abs() > CPTP_TOL {
        return Err(AnalysisError::NotAState(format!("trace {tr}")));
    }
    let eig = hermitian_eig(rho, 1e-8)
        .map_err(|_| AnalysisError::NotAState("anchor is not Hermitian".into()))?;
    if eig.values[0] < -CPTP_TOL {
        return Err(AnalysisError::NotAState(format!(
            "eigenvalue {:e}",
            eig.values[0]
        )));
    }
    Ok(())
}

impl Subchannel {
    pub fn dim(&self) -> usize {
        self.layout.factors()[self.keep]
    }

    pub fn keep(&self) -> usize {
        self.keep
    }

    pub fn anchor(&self) -> &Matrix {
        &self.anchor
    }

    /// `sigma (x) anchor` with the factors in layout order.
    fn place(&self, sigma: &Matrix) -> Result<Matrix> {
        let dims = self.layout.factors();
        let joint = kron(sigma, &self.anchor);
        let mut current: Vec<usize> = alloc::vec![self.keep];
        current.extend((0..dims.len()).filter(|&k| k != self.keep));
        let current_dims: Vec<usize> = current.iter().map(|&k| dims[k]).collect();
        let order: Vec<usize> = (0..dims.len())
            .map(|t| current.iter().position(|&k| k == t).expect("listed"))
            .collect();
        Ok(reorder_subsystems(&joint, &current_dims, &order)?)
    }

    /// Evaluates the subchannel on an operator of the kept subsystem.
    pub fn apply(&self, sigma: &Matrix) -> Result<Matrix> {
        if sigma.rows() != self.dim() || !sigma.is_square() {
            return Err(AnalysisError::LayoutMismatch(format!(
                "input of dimension {} for a subsystem of dimension {}",
                sigma.rows(),
                self.dim()
            )));
        }
        let out = self.parent.apply(&self.place(sigma)?)?;
        Ok(partial_trace(&out, &self.layout, &[self.keep])?)
    }

    pub fn superoperator(&self) -> Result<Matrix> {
        superoperator_of_map(self.dim(), |x| self.apply(x))
    }

    pub fn choi(&self) -> Result<Matrix> {
        choi_matrix(self.dim(), |x| self.apply(x))
    }

    /// Kraus representation of the subchannel.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let kraus = kraus_from_choi(&self.choi()?, self.dim(), 1e-12)?;
        Ok(QuantumChannel::new(kraus)?)
    }

    fn check_cptp(&self) -> Result<()> {
        let d = self.dim();
        for k in 0..d {
            for l in 0..d {
                let tr = self.apply(&super::channels::matrix_unit(d, k, l))?.trace();
                let expected = if k == l { 1.0 } else { 0.0 };
                if (tr.re - expected).abs() > CPTP_TOL || tr.im.abs() > CPTP_TOL {
                    return Err(AnalysisError::NotCptp(format!(
                        "trace of image of |{k}><{l}| is {tr}"
                    )));
                }
            }
        }
        let choi = self.choi()?;
        let eig = hermitian_eig(&choi, 1e-8)?;
        if eig.values[0] < -CPTP_TOL {
            return Err(AnalysisError::NotCptp(format!(
                "Choi eigenvalue {:e}",
                eig.values[0]
            )));
        }
        Ok(())
    }
}
