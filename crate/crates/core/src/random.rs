//! Random states, unitaries and channels for property checks.
//!
//! Unitaries are Haar-distributed (QR of a complex Ginibre matrix with the
//! phases of `R`'s diagonal removed); channels are blocks of a random
//! isometry.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::linalg::{c64, inner, normalize, Matrix, C64};
use crate::model::QuantumChannel;

/// Standard normal sample via the Box-Muller transform.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Complex Gaussian with independent standard normal parts.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c64(gaussian(rng), gaussian(rng))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
    normalize(&v)
}

/// Full-rank random density matrix `G G^dagger / tr(G G^dagger)`.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = ginibre(d, d, rng);
    let rho = g.matmul(&g.adjoint()).expect("square");
    let tr = rho.trace().re;
    rho.scale_re(1.0 / tr).hermitian_part()
}

/// Haar-random unitary.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.column(j);
        for q in &cols {
            let c = inner(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        // Gram-Schmidt leaves R with a positive diagonal, so Q is Haar.
        let norm = crate::linalg::vec_norm(&v);
        cols.push(v.iter().map(|z| z / norm).collect());
    }
    Matrix::from_columns(&cols)
}

/// Haar-random isometry with `rows >= cols`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let u = random_unitary(rows, rng);
    Matrix::from_fn(rows, cols, |i, j| u[(i, j)])
}

/// Random channel on dimension `d` with `kraus_count` Kraus operators, taken
/// as the row blocks of a random isometry.
pub fn random_channel<R: Rng + ?Sized>(d: usize, kraus_count: usize, rng: &mut R) -> QuantumChannel {
    let v = random_isometry(d * kraus_count, d, rng);
    let kraus = (0..kraus_count)
        .map(|j| Matrix::from_fn(d, d, |r, c| v[(j * d + r, c)]))
        .collect();
    QuantumChannel::new(kraus).expect("consistent shapes")
}

/// Uniform angle in `[0, 2 pi)`.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * core::f64::consts::TAU
}
