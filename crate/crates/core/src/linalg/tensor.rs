use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::{LinalgError, Matrix, Result, C64};

/// Ordered subsystem dimensions of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimsLayout {
    factors: Vec<usize>,
}

impl DimsLayout {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(LinalgError::InvalidLayout("no factors"));
        }
        if factors.iter().any(|&d| d < 2) {
            return Err(LinalgError::InvalidLayout("factor below 2"));
        }
        Ok(Self { factors })
    }

    /// `n` qubit factors.
    pub fn qubits(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (br, bc) = (b.rows(), b.cols());
    Matrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of a non-empty list of matrices, left to right.
pub fn kron_all(ms: &[Matrix]) -> Matrix {
    let mut it = ms.iter();
    let first = it.next().expect("at least one factor").clone();
    it.fold(first, |acc, m| kron(&acc, m))
}

/// Tensor product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn check_square_total(m: &Matrix, layout: &DimsLayout) -> Result<()> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() != layout.total() {
        return Err(LinalgError::DimensionMismatch {
            expected: layout.total(),
            found: m.rows(),
        });
    }
    Ok(())
}

fn check_indices(indices: &[usize], count: usize) -> Result<()> {
    let mut seen = vec![false; count];
    for &k in indices {
        if k >= count {
            return Err(LinalgError::SubsystemOutOfRange { index: k, count });
        }
        if seen[k] {
            return Err(LinalgError::DuplicateSubsystem(k));
        }
        seen[k] = true;
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Decodes `index` as digits over the subsystems `which`, returning the
/// contribution to a full-space index.
fn scatter(mut index: usize, which: &[usize], dims: &[usize], st: &[usize]) -> usize {
    let mut full = 0;
    for &k in which.iter().rev() {
        full += (index % dims[k]) * st[k];
        index /= dims[k];
    }
    full
}

/// Traces out every subsystem not listed in `keep`. The kept subsystems
/// appear in the output in the order given by `keep`.
pub fn partial_trace(m: &Matrix, layout: &DimsLayout, keep: &[usize]) -> Result<Matrix> {
    check_square_total(m, layout)?;
    let dims = layout.factors();
    check_indices(keep, dims.len())?;
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let st = strides(dims);
    let dk: usize = keep.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    let offsets: Vec<usize> = (0..dt).map(|t| scatter(t, &traced, dims, &st)).collect();
    let base: Vec<usize> = (0..dk).map(|r| scatter(r, keep, dims, &st)).collect();
    Ok(Matrix::from_fn(dk, dk, |r, c| {
        offsets
            .iter()
            .map(|&o| m[(base[r] + o, base[c] + o)])
            .sum()
    }))
}

/// Permutes tensor factors: subsystem `t` of the result is subsystem
/// `order[t]` of `m`, whose factors are `dims`.
pub fn reorder_subsystems(m: &Matrix, dims: &[usize], order: &[usize]) -> Result<Matrix> {
    let layout = DimsLayout::new(dims.to_vec())?;
    check_square_total(m, &layout)?;
    check_indices(order, dims.len())?;
    if order.len() != dims.len() {
        return Err(LinalgError::InvalidLayout("order must list every subsystem"));
    }
    let st = strides(dims);
    let d = layout.total();
    // Output index i decodes over factors dims[order[0]], dims[order[1]], ...
    let map: Vec<usize> = (0..d).map(|i| scatter(i, order, dims, &st)).collect();
    Ok(Matrix::from_fn(d, d, |i, j| m[(map[i], map[j])]))
}

/// Embeds a `2^k x 2^k` operator acting on the listed 1-based qubits into an
/// `n`-qubit space. The first listed qubit is the most significant index of
/// `u`; qubit 1 is the most significant qubit of the register.
pub fn embed(u: &Matrix, qubits: &[usize], n: usize) -> Result<Matrix> {
    let k = qubits.len();
    if u.rows() != 1 << k || !u.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: 1 << k,
            found: u.rows(),
        });
    }
    let zero_based: Vec<usize> = qubits.iter().map(|&q| q.wrapping_sub(1)).collect();
    check_indices(&zero_based, n)?;
    let d = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mask: usize = zero_based.iter().map(|&q| bit(q)).sum();
    let sub = |idx: usize| {
        zero_based
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | usize::from(idx & bit(q) != 0))
    };
    let place = |rest: usize, s: usize| {
        zero_based.iter().enumerate().fold(rest, |acc, (pos, &q)| {
            if s & (1 << (k - 1 - pos)) != 0 {
                acc | bit(q)
            } else {
                acc
            }
        })
    };
    let mut out = Matrix::zeros(d, d);
    for c in 0..d {
        let rest = c & !mask;
        let sc = sub(c);
        for sr in 0..(1 << k) {
            let z = u[(sr, sc)];
            if !z.is_zero() {
                out[(place(rest, sr), c)] = z;
            }
        }
    }
    Ok(out)
}
