use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::linalg::{inner, Matrix, C64};

use super::{ModelError, OutcomeLabel, Result};

/// Labelled measurement effects.
///
/// Effects that are rank-one projectors are detected at construction and
/// evaluated through their vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    outcomes: Vec<(OutcomeLabel, Matrix)>,
    rank_one: Option<Vec<Vec<C64>>>,
}

const RANK_ONE_TOL: f64 = 1e-10;

impl Povm {
    pub fn new(outcomes: Vec<(OutcomeLabel, Matrix)>) -> Result<Self> {
        let dim = outcomes.first().ok_or(ModelError::EmptyPovm)?.1.rows();
        let mut seen = BTreeSet::new();
        for (label, effect) in &outcomes {
            if !seen.insert(label.clone()) {
                return Err(ModelError::DuplicateLabel(label.as_str().into()));
            }
            if !effect.is_square() || effect.rows() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: effect.rows(),
                });
            }
            if !effect.is_finite() {
                return Err(ModelError::NonFinite);
            }
        }
        let rank_one = outcomes
            .iter()
            .map(|(_, e)| rank_one_vector(e))
            .collect::<Option<Vec<_>>>();
        Ok(Self { outcomes, rank_one })
    }

    /// Projective measurement onto the given orthonormal vectors.
    pub fn from_basis(labels: Vec<OutcomeLabel>, vectors: &[Vec<C64>]) -> Result<Self> {
        if labels.len() != vectors.len() {
            return Err(ModelError::DimensionMismatch {
                expected: labels.len(),
                found: vectors.len(),
            });
        }
        Self::new(
            labels
                .into_iter()
                .zip(vectors)
                .map(|(l, v)| (l, Matrix::projector(v)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].1.rows()
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[(OutcomeLabel, Matrix)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &OutcomeLabel> {
        self.outcomes.iter().map(|(l, _)| l)
    }

    /// Vectors of the effects when every effect is a rank-one projector.
    pub fn rank_one_vectors(&self) -> Option<&[Vec<C64>]> {
        self.rank_one.as_deref()
    }

    /// `tr(M_a rho)` for each effect, clamped at zero.
    pub fn probabilities(&self, rho: &Matrix) -> Vec<f64> {
        match &self.rank_one {
            Some(vs) => vs
                .iter()
                .map(|v| {
                    let rv = rho.mat_vec(v).expect("dimension checked");
                    inner(v, &rv).re.max(0.0)
                })
                .collect(),
            None => self
                .outcomes
                .iter()
                .map(|(_, e)| e.trace_product(rho).re.max(0.0))
                .collect(),
        }
    }

    /// `<psi|M_a|psi>` for each effect, clamped at zero.
    pub fn probabilities_pure(&self, psi: &[C64]) -> Vec<f64> {
        match &self.rank_one {
            Some(vs) => vs.iter().map(|v| inner(v, psi).norm_sqr()).collect(),
            None => self
                .outcomes
                .iter()
                .map(|(_, e)| {
                    let ev = e.mat_vec(psi).expect("dimension checked");
                    inner(psi, &ev).re.max(0.0)
                })
                .collect(),
        }
    }

    pub fn conjugated_by(&self, u: &Matrix) -> Result<Self> {
        Self::new(
            self.outcomes
                .iter()
                .map(|(l, e)| Ok((l.clone(), u.conjugate(e)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn complex_conjugate(&self) -> Self {
        Self::new(
            self.outcomes
                .iter()
                .map(|(l, e)| (l.clone(), e.conj()))
                .collect(),
        )
        .expect("same shapes")
    }
}

/// Returns `v` with `m = |v><v|` and `||v|| = 1`, if such a vector exists.
pub(crate) fn rank_one_vector(m: &Matrix) -> Option<Vec<C64>> {
    let d = m.rows();
    let (col, norm) = (0..d)
        .map(|j| {
            let n: f64 = (0..d).map(|i| m[(i, j)].norm_sqr()).sum();
            (j, n)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    // For m = |v><v|, column j is v * conj(v_j) with norm |v_j|.
    let scale = num_traits::Float::sqrt(norm);
    if scale < 1e-6 {
        return None;
    }
    let v: Vec<C64> = (0..d).map(|i| m[(i, col)] / scale).collect();
    (Matrix::projector(&v).distance(m) <= RANK_ONE_TOL).then_some(v)
}
