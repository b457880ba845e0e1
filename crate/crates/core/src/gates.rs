//! Standard gates, single-qubit states and the built-in target models.
//!
//! Label conventions: a single qubit uses `s`; two qubits use `s_a`, `s_b`,
//! `h`, `cx`, `cs`; three or more use `s1..sn`, `h`, `cx12..cx1n`, `cs12`.
//! Qubit indices are 1-based and qubit 1 is the leftmost outcome bit.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::linalg::{c64, embed, kron_all, LinalgError, Matrix, C64};
use crate::model::{Label, ModelError, OutcomeLabel, Povm, QuantumChannel, QuantumModel};

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Errors raised when building gates or target models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("model {model} is not defined for n = {n}")]
    UnsupportedSize { model: &'static str, n: usize },
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = core::result::Result<T, GateError>;

pub fn identity2() -> Matrix {
    Matrix::identity(2)
}

pub fn pauli_x() -> Matrix {
    Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> Matrix {
    Matrix::from_rows(&[&[c64(0.0, 0.0), c64(0.0, -1.0)], &[c64(0.0, 1.0), c64(0.0, 0.0)]])
}

pub fn pauli_z() -> Matrix {
    Matrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn hadamard() -> Matrix {
    let r = FRAC_1_SQRT_2;
    Matrix::from_real_rows(&[&[r, r], &[r, -r]])
}

/// `diag(1, i)`.
pub fn s_gate() -> Matrix {
    Matrix::diag(&[c64(1.0, 0.0), c64(0.0, 1.0)])
}

/// `diag(1, e^{i pi/4})`.
pub fn t_gate() -> Matrix {
    Matrix::diag(&[c64(1.0, 0.0), c64(FRAC_1_SQRT_2, FRAC_1_SQRT_2)])
}

/// `diag(1, e^{i alpha})`.
pub fn phase_gate(alpha: f64) -> Matrix {
    Matrix::diag(&[c64(1.0, 0.0), c64(alpha.cos(), alpha.sin())])
}

/// `(1+i)/2 [[1, -1], [1, 1]]`, the quarter turn about the Y axis; its
/// square is `Y`.
pub fn s_y_gate() -> Matrix {
    let p = c64(0.5, 0.5);
    Matrix::from_rows(&[&[p, -p], &[p, p]])
}

/// Controlled-S, control on the first qubit.
pub fn controlled_s() -> Matrix {
    Matrix::diag(&[c64(1.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0)])
}

/// `|+><+| (x) I + |-><-| (x) X`: X on the second qubit conditioned on the
/// first being `|->`.
pub fn controlled_hx() -> Matrix {
    let h = hadamard();
    let cnot = cnot();
    let h1 = crate::linalg::kron(&h, &identity2());
    h1.matmul(&cnot).and_then(|m| m.matmul(&h1)).expect("4x4")
}

/// Doubly controlled Z on three qubits.
pub fn ccz() -> Matrix {
    let mut d = vec![c64(1.0, 0.0); 8];
    d[7] = c64(-1.0, 0.0);
    Matrix::diag(&d)
}

pub fn cnot() -> Matrix {
    Matrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}

pub fn swap() -> Matrix {
    Matrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
    ])
}

pub fn ket0() -> Vec<C64> {
    vec![c64(1.0, 0.0), c64(0.0, 0.0)]
}

pub fn ket1() -> Vec<C64> {
    vec![c64(0.0, 0.0), c64(1.0, 0.0)]
}

pub fn ket_plus() -> Vec<C64> {
    vec![c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)]
}

pub fn ket_minus() -> Vec<C64> {
    vec![c64(FRAC_1_SQRT_2, 0.0), c64(-FRAC_1_SQRT_2, 0.0)]
}

pub fn ket_plus_y() -> Vec<C64> {
    vec![c64(FRAC_1_SQRT_2, 0.0), c64(0.0, FRAC_1_SQRT_2)]
}

pub fn ket_minus_y() -> Vec<C64> {
    vec![c64(FRAC_1_SQRT_2, 0.0), c64(0.0, -FRAC_1_SQRT_2)]
}

/// Single-qubit state by symbol: `0`, `1`, `+`, `-`, `+y`, `-y`.
pub fn named_qubit_state(symbol: &str) -> Option<Vec<C64>> {
    Some(match symbol {
        "0" => ket0(),
        "1" => ket1(),
        "+" => ket_plus(),
        "-" => ket_minus(),
        "+y" | "+i" => ket_plus_y(),
        "-y" | "-i" => ket_minus_y(),
        _ => return None,
    })
}

/// Tensor product of single-qubit vectors, qubit 1 first.
pub fn product_state(qubits: &[Vec<C64>]) -> Vec<C64> {
    let mut it = qubits.iter();
    let first = it.next().expect("at least one qubit").clone();
    it.fold(first, |acc, q| crate::linalg::kron_vec(&acc, q))
}

/// Unitary `|+_y><0| + |-_y><1|`, taking the S-model frame to the
/// Y-rotation frame: `W S W^dagger = S_y`.
pub fn sy_frame() -> Matrix {
    Matrix::from_columns(&[ket_plus_y(), ket_minus_y()])
}

fn check_qubit(index: usize, n: usize) -> Result<()> {
    if index == 0 || index > n {
        return Err(GateError::QubitOutOfRange { index, n });
    }
    Ok(())
}

/// Single-qubit gate on qubit `k` of `n`.
pub fn on_qubit(u: &Matrix, k: usize, n: usize) -> Result<Matrix> {
    check_qubit(k, n)?;
    Ok(embed(u, &[k], n)?)
}

/// Two-qubit gate on qubits `(j, k)` of `n`, `j` taking the role of the
/// gate's first qubit.
pub fn on_qubits(u: &Matrix, j: usize, k: usize, n: usize) -> Result<Matrix> {
    check_qubit(j, n)?;
    check_qubit(k, n)?;
    Ok(embed(u, &[j, k], n)?)
}

fn label(name: &str) -> Label {
    Label::new(name).expect("built-in labels are valid")
}

/// Label of the phase gate on qubit `k` of `n`.
pub fn s_label(k: usize, n: usize) -> Label {
    match n {
        1 => label("s"),
        2 => label(if k == 1 { "s_a" } else { "s_b" }),
        _ => label(&format!("s{k}")),
    }
}

pub fn h_label() -> Label {
    label("h")
}

/// Label of the conditional-X gate on qubits `(1, k)` of `n`.
pub fn cx_label(k: usize, n: usize) -> Label {
    if n == 2 {
        label("cx")
    } else {
        label(&format!("cx1{k}"))
    }
}

/// Label of the controlled-S gate on qubits `(1, 2)` of `n`.
pub fn cs_label(n: usize) -> Label {
    if n == 2 {
        label("cs")
    } else {
        label("cs12")
    }
}

pub fn t_label() -> Label {
    label("t")
}

/// Bitstring of length `n` for index `j`, qubit 1 most significant.
pub fn bitstring(j: usize, n: usize) -> String {
    (0..n)
        .map(|q| if j & (1 << (n - 1 - q)) != 0 { '1' } else { '0' })
        .collect()
}

fn outcome_labels(n: usize) -> Vec<OutcomeLabel> {
    (0..1usize << n)
        .map(|j| OutcomeLabel::new(&bitstring(j, n)).expect("non-empty"))
        .collect()
}

/// The `2^n` product vectors over `{zero, one}` in bitstring order.
pub fn product_basis(n: usize, zero: &[C64], one: &[C64]) -> Vec<Vec<C64>> {
    (0..1usize << n)
        .map(|j| {
            let qubits: Vec<Vec<C64>> = (0..n)
                .map(|q| {
                    if j & (1 << (n - 1 - q)) != 0 {
                        one.to_vec()
                    } else {
                        zero.to_vec()
                    }
                })
                .collect();
            product_state(&qubits)
        })
        .collect()
}

/// Measurement in the `|+>, |->` product basis; `+` reads as `0`.
pub fn hadamard_basis_povm(n: usize) -> Povm {
    Povm::from_basis(outcome_labels(n), &product_basis(n, &ket_plus(), &ket_minus()))
        .expect("orthonormal basis")
}

/// Measurement in the computational basis.
pub fn computational_povm(n: usize) -> Povm {
    Povm::from_basis(outcome_labels(n), &product_basis(n, &ket0(), &ket1()))
        .expect("orthonormal basis")
}

/// The `n`-qubit vector with every qubit in `state`.
pub fn uniform_product(state: &[C64], n: usize) -> Vec<C64> {
    product_state(&vec![state.to_vec(); n])
}

fn require(model: &'static str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(GateError::UnsupportedSize { model, n });
    }
    Ok(())
}

fn s_channels(n: usize, gate: &Matrix) -> Result<Vec<(Label, QuantumChannel)>> {
    (1..=n)
        .map(|k| Ok((s_label(k, n), QuantumChannel::unitary(on_qubit(gate, k, n)?)?)))
        .collect()
}

/// `S_n`: `|+>^n`, phase gates on each qubit, `+/-` basis measurement.
pub fn build_s(n: usize) -> Result<QuantumModel> {
    require("S", n, 1)?;
    let psi = uniform_product(&ket_plus(), n);
    Ok(QuantumModel::new(
        Matrix::projector(&psi),
        s_channels(n, &s_gate())?,
        hadamard_basis_povm(n),
    )?)
}

/// `Cl_n`: `S_n` plus `H` on qubit 1 and conditional-X gates `(1, k)`.
pub fn build_cl(n: usize) -> Result<QuantumModel> {
    let mut m = build_s(n)?;
    m = m.augment(h_label(), QuantumChannel::unitary(on_qubit(&hadamard(), 1, n)?)?)?;
    for k in 2..=n {
        m = m.augment(
            cx_label(k, n),
            QuantumChannel::unitary(on_qubits(&controlled_hx(), 1, k, n)?)?,
        )?;
    }
    Ok(m)
}

/// `U_n`: `Cl_n` plus controlled-S on qubits `(1, 2)`.
pub fn build_u(n: usize) -> Result<QuantumModel> {
    require("U", n, 2)?;
    let m = build_cl(n)?;
    Ok(m.augment(
        cs_label(n),
        QuantumChannel::unitary(on_qubits(&controlled_s(), 1, 2, n)?)?,
    )?)
}

/// `Sy_n`: `|0>^n`, Y-axis quarter turns on each qubit, computational
/// measurement.
pub fn build_sy(n: usize) -> Result<QuantumModel> {
    require("Sy", n, 1)?;
    let psi = uniform_product(&ket0(), n);
    Ok(QuantumModel::new(
        Matrix::projector(&psi),
        s_channels(n, &s_y_gate())?,
        computational_povm(n),
    )?)
}

/// `n`-fold tensor power of the single-qubit frame change to the Y model.
pub fn sy_frame_n(n: usize) -> Matrix {
    kron_all(&vec![sy_frame(); n])
}
