//! Helpers shared by the integration tests. Expected values are computed
//! here from first principles, independently of the library routines.

#![allow(dead_code)]

use qsq_core::{c64, InstructionString, Matrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn s(text: &str) -> InstructionString {
    InstructionString::parse(text).unwrap()
}

pub fn real(rows: &[&[f64]]) -> Matrix {
    Matrix::from_real_rows(rows)
}

pub fn ket(amplitudes: &[C64]) -> Vec<C64> {
    amplitudes.to_vec()
}

pub fn r(x: f64) -> C64 {
    c64(x, 0.0)
}

pub fn i(x: f64) -> C64 {
    c64(0.0, x)
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()));
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn assert_close(a: &Matrix, b: &Matrix, tol: f64) {
    let d = max_abs_diff(a, b);
    assert!(d <= tol, "matrices differ by {d:e}:\n{a:?}\n{b:?}");
}

/// `a = e^{i phi} b` for some phi, checked entrywise against the largest
/// entry of `b`.
pub fn assert_proportional(a: &Matrix, b: &Matrix, tol: f64) {
    let (k, _) = b
        .as_slice()
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
        .unwrap();
    let phase = a.as_slice()[k] / b.as_slice()[k];
    assert!((phase.norm() - 1.0).abs() <= tol, "ratio {phase} is not a phase");
    assert_close(a, &b.scale(phase), tol);
}

/// Textbook matrix product.
pub fn naive_mul(a: &Matrix, b: &Matrix) -> Matrix {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|k| a[(i, k)] * b[(k, j)]).sum()
    })
}

/// `sum_j K_j rho K_j^dag` with textbook products.
pub fn naive_apply(kraus: &[Matrix], rho: &Matrix) -> Matrix {
    let d = rho.rows();
    let mut out = Matrix::zeros(d, d);
    for k in kraus {
        out = &out + &naive_mul(&naive_mul(k, rho), &k.adjoint());
    }
    out
}

/// `|v><v|` for a state vector.
pub fn proj(v: &[C64]) -> Matrix {
    Matrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
}

pub fn basis_ket(j: usize, d: usize) -> Vec<C64> {
    (0..d).map(|k| if k == j { r(1.0) } else { r(0.0) }).collect()
}

/// Probability of `outcome` given a state, from the projector onto the
/// outcome's basis vector.
pub fn prob(v: &[C64], rho: &Matrix) -> f64 {
    let d = v.len();
    let mut acc = c64(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            acc += v[a].conj() * rho[(a, b)] * v[b];
        }
    }
    acc.re
}
