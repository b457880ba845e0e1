use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Matrix;

use super::{AnalysisError, Result};

/// Graph on basis indices with an edge wherever some state has a
/// non-negligible coherence `<psi_i|sigma|psi_j>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceGraph {
    adjacency: Vec<Vec<bool>>,
}

impl CoherenceGraph {
    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![vec![false; d]; d];
        for &(i, j) in edges {
            if i != j {
                adjacency[i][j] = true;
                adjacency[j][i] = true;
            }
        }
        Self { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    /// Edges `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let d = self.len();
        (0..d)
            .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
            .filter(|&(i, j)| self.adjacency[i][j])
            .collect()
    }

    /// Breadth-first spanning tree from vertex 0 as `(parent, child)` pairs,
    /// in discovery order.
    pub fn spanning_tree(&self) -> Vec<(usize, usize)> {
        let d = self.len();
        if d == 0 {
            return Vec::new();
        }
        let mut seen = vec![false; d];
        seen[0] = true;
        let mut queue = alloc::collections::VecDeque::from([0usize]);
        let mut tree = Vec::new();
        while let Some(i) = queue.pop_front() {
            for j in 0..d {
                if self.adjacency[i][j] && !seen[j] {
                    seen[j] = true;
                    tree.push((i, j));
                    queue.push_back(j);
                }
            }
        }
        tree
    }

    pub fn is_connected(&self) -> bool {
        self.len() <= 1 || self.spanning_tree().len() == self.len() - 1
    }
}

/// Coherence graph of `states` with respect to the orthonormal columns of
/// `basis`; an edge needs `|<psi_i|sigma|psi_j>| > tol` for some state.
pub fn coherence_graph(basis: &Matrix, states: &[Matrix], tol: f64) -> Result<CoherenceGraph> {
    let d = basis.cols();
    let gram = basis.adjoint().matmul(basis)?;
    let deviation = gram.distance(&Matrix::identity(d));
    if deviation > tol.max(1e-9) {
        return Err(AnalysisError::NonOrthonormalBasis { deviation });
    }
    let mut adjacency = vec![vec![false; d]; d];
    for sigma in states {
        if sigma.rows() != basis.rows() {
            return Err(AnalysisError::LayoutMismatch(alloc::format!(
                "state of dimension {} for a basis of dimension {}",
                sigma.rows(),
                basis.rows()
            )));
        }
        let m = basis.adjoint().matmul(sigma)?.matmul(basis)?;
        for i in 0..d {
            for j in 0..d {
                if i != j && m[(i, j)].norm() > tol {
                    adjacency[i][j] = true;
                }
            }
        }
    }
    Ok(CoherenceGraph { adjacency })
}
