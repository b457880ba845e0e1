use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{inner, phase_aligned_distance, Matrix, SparseMatrix, C64};
use crate::model::{InstructionString, Label, QuantumChannel, QuantumModel};

use super::{ExpectedOutcomeTable, InstructionError, InstructionSet, Result, DEFAULT_EPS};

const BASIS_TOL: f64 = 1e-8;
const MAX_GATE_ORDER: usize = 16;

/// Limits for the search of complement strings that map a state to one
/// with a single possible outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementSearch {
    /// Longest string tried by breadth-first search.
    pub max_len: usize,
    /// Distinct states visited before falling back to gate inversion.
    pub max_nodes: usize,
    /// Support threshold.
    pub eps: f64,
}

impl Default for ComplementSearch {
    fn default() -> Self {
        Self {
            max_len: 12,
            max_nodes: 4096,
            eps: DEFAULT_EPS,
        }
    }
}

/// Unitary simulator of the certified model on state vectors.
struct PureSim<'a> {
    model: &'a QuantumModel,
    labels: Vec<Label>,
    gates: Vec<SparseMatrix>,
    orders: Vec<usize>,
    initial: Vec<C64>,
}

impl<'a> PureSim<'a> {
    fn new(model: &'a QuantumModel) -> Result<Self> {
        let initial = model.pure_initial_state().ok_or_else(|| {
            InstructionError::ConditionI("certified model needs a pure initial state".to_string())
        })?;
        let mut labels = Vec::new();
        let mut gates = Vec::new();
        let mut orders = Vec::new();
        for (l, ch) in model.channels() {
            let u = ch.as_unitary(1e-9).ok_or_else(|| {
                InstructionError::ConditionI(format!("certified channel {l} is not unitary"))
            })?;
            orders.push(gate_order(&u).ok_or_else(|| {
                InstructionError::ConditionI(format!("certified gate {l} has no finite order"))
            })?);
            labels.push(l.clone());
            gates.push(SparseMatrix::from_dense(&u));
        }
        Ok(Self {
            model,
            labels,
            gates,
            orders,
            initial,
        })
    }

    fn index(&self, l: &Label) -> Result<usize> {
        self.labels
            .iter()
            .position(|x| x == l)
            .ok_or_else(|| InstructionError::UnknownLabel(l.as_str().into()))
    }

    fn run_from(&self, start: &[C64], x: &InstructionString) -> Result<Vec<C64>> {
        let mut v = start.to_vec();
        for l in x.labels() {
            v = self.gates[self.index(l)?].apply(&v);
        }
        Ok(v)
    }

    fn prepare(&self, x: &InstructionString) -> Result<Vec<C64>> {
        self.run_from(&self.initial, x)
    }

    fn support_size(&self, v: &[C64], eps: f64) -> usize {
        self.model
            .povm()
            .probabilities_pure(v)
            .into_iter()
            .filter(|&p| p > eps)
            .count()
    }

    /// Reverses `x`, replacing every gate by its inverse power.
    fn inverse(&self, x: &InstructionString) -> Result<InstructionString> {
        let mut out = InstructionString::empty();
        for l in x.labels().iter().rev() {
            let k = self.index(l)?;
            out.extend(&InstructionString::repeat(l, self.orders[k] - 1));
        }
        Ok(out)
    }

    /// Shortest string (by breadth-first search, then gate inversion of
    /// `prep`) taking `start` to a state with a single possible outcome.
    fn complement(
        &self,
        start: &[C64],
        prep: &InstructionString,
        search: &ComplementSearch,
    ) -> Result<Option<InstructionString>> {
        if self.support_size(start, search.eps) == 1 {
            return Ok(Some(InstructionString::empty()));
        }
        if let Some(found) = self.bfs(start, search) {
            return Ok(Some(found));
        }
        let inv = self.inverse(prep)?;
        let end = self.run_from(start, &inv)?;
        Ok((self.support_size(&end, search.eps) == 1).then_some(inv))
    }

    fn bfs(&self, start: &[C64], search: &ComplementSearch) -> Option<InstructionString> {
        struct Node {
            state: Vec<C64>,
            parent: usize,
            gate: usize,
            depth: usize,
        }
        let mut nodes = alloc::vec![Node {
            state: start.to_vec(),
            parent: usize::MAX,
            gate: 0,
            depth: 0,
        }];
        let mut seen = BTreeSet::from([state_key(start)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(idx) = queue.pop_front() {
            if nodes[idx].depth >= search.max_len {
                continue;
            }
            for (g, gate) in self.gates.iter().enumerate() {
                let next = gate.apply(&nodes[idx].state);
                if !seen.insert(state_key(&next)) {
                    continue;
                }
                let singleton = self.support_size(&next, search.eps) == 1;
                nodes.push(Node {
                    state: next,
                    parent: idx,
                    gate: g,
                    depth: nodes[idx].depth + 1,
                });
                let new_idx = nodes.len() - 1;
                if singleton {
                    let mut path = Vec::new();
                    let mut cur = new_idx;
                    while cur != 0 {
                        path.push(self.labels[nodes[cur].gate].clone());
                        cur = nodes[cur].parent;
                    }
                    path.reverse();
                    return Some(InstructionString::from_labels(path));
                }
                if nodes.len() >= search.max_nodes {
                    return None;
                }
                queue.push_back(new_idx);
            }
        }
        None
    }
}

/// Rounded, global-phase-normalized amplitudes used to deduplicate states.
fn state_key(v: &[C64]) -> Vec<i64> {
    let max = v.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm_sqr() >= max - 1e-6)
        .copied()
        .unwrap_or(C64::new(1.0, 0.0));
    let phase = pivot.conj() / pivot.norm();
    v.iter()
        .flat_map(|z| {
            let w = z * phase;
            [(w.re * 1e6).round() as i64, (w.im * 1e6).round() as i64]
        })
        .collect()
}

/// Smallest `k` with `u^k` proportional to the identity.
fn gate_order(u: &Matrix) -> Option<usize> {
    let id = Matrix::identity(u.rows());
    let mut p = u.clone();
    for k in 1..=MAX_GATE_ORDER {
        let scale = (u.rows() as f64).sqrt();
        if phase_aligned_distance(&p, &id).ok()? <= 1e-9 * scale {
            return Some(k);
        }
        p = p.matmul(u).ok()?;
    }
    None
}

/// Tests certifying a new unitary `u` under `label` on top of a certified
/// model, with the default complement search.
///
/// Each eigen preparation must prepare one vector of an orthonormal
/// eigenbasis of `u`; the coherent preparations must connect that basis.
/// For every preparation `x` a complement `x'` is found such that the
/// target gives a single outcome for `x label x'`.
pub fn gen_augmentation_tests(
    certified: &QuantumModel,
    label: Label,
    u: &Matrix,
    eigen_preps: &[InstructionString],
    coherent_preps: &[InstructionString],
) -> Result<(InstructionSet, ExpectedOutcomeTable)> {
    gen_augmentation_tests_with(
        certified,
        label,
        u,
        eigen_preps,
        coherent_preps,
        &ComplementSearch::default(),
    )
}

/// [`gen_augmentation_tests`] with explicit search limits.
pub fn gen_augmentation_tests_with(
    certified: &QuantumModel,
    label: Label,
    u: &Matrix,
    eigen_preps: &[InstructionString],
    coherent_preps: &[InstructionString],
    search: &ComplementSearch,
) -> Result<(InstructionSet, ExpectedOutcomeTable)> {
    let d = certified.dim();
    if u.rows() != d || !crate::linalg::is_unitary(u, 1e-9) {
        return Err(InstructionError::ConditionII(
            "u must be a unitary on the model's space".to_string(),
        ));
    }
    if certified.channel(&label).is_some() {
        return Err(InstructionError::Model(crate::model::ModelError::DuplicateLabel(
            label.as_str().into(),
        )));
    }
    let sim = PureSim::new(certified)?;

    let basis = eigen_preps
        .iter()
        .map(|x| sim.prepare(x))
        .collect::<Result<Vec<_>>>()?;
    check_eigenbasis(u, &basis, d)?;

    let coherent = coherent_preps
        .iter()
        .map(|x| sim.prepare(x))
        .collect::<Result<Vec<_>>>()?;
    check_connected(&basis, &coherent)?;

    let u_label = InstructionString::from_labels(alloc::vec![label.clone()]);
    let mut set = InstructionSet::new(&format!("{}+{}", certified_target(certified), label));
    for (x, psi) in eigen_preps.iter().zip(&basis) {
        let image = u.mat_vec(psi).expect("dimension checked");
        let y = sim.complement(&image, x, search)?.ok_or_else(|| {
            InstructionError::ConditionI(format!("no complement found for eigen preparation {x}"))
        })?;
        set.push(x.concat(&u_label).concat(&y));
    }
    for (x, sigma) in coherent_preps.iter().zip(&coherent) {
        let image = u.mat_vec(sigma).expect("dimension checked");
        let y = sim.complement(&image, x, search)?.ok_or_else(|| {
            InstructionError::ConditionIII(format!(
                "no complement found for coherent preparation {x}"
            ))
        })?;
        set.push(x.concat(&u_label).concat(&y));
    }
    let augmented = certified.augment(label, QuantumChannel::unitary(u.clone())?)?;
    let table = ExpectedOutcomeTable::from_target(&augmented, &set, search.eps)?;
    Ok((set, table))
}

fn certified_target(m: &QuantumModel) -> alloc::string::String {
    let labels: Vec<&str> = m.alphabet().map(Label::as_str).collect();
    labels.join(",")
}

fn check_eigenbasis(u: &Matrix, basis: &[Vec<C64>], d: usize) -> Result<()> {
    if basis.len() != d {
        return Err(InstructionError::ConditionII(format!(
            "{} eigen preparations for dimension {d}",
            basis.len()
        )));
    }
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i + 1) {
            let overlap = inner(a, b).norm();
            if overlap > BASIS_TOL {
                return Err(InstructionError::ConditionII(format!(
                    "preparations {i} and {j} are not orthogonal (overlap {overlap:e})"
                )));
            }
        }
        let ua = u.mat_vec(a).expect("dimension checked");
        let lambda = inner(a, &ua);
        let residual: f64 = ua
            .iter()
            .zip(a)
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if residual > BASIS_TOL {
            return Err(InstructionError::ConditionII(format!(
                "preparation {i} is not an eigenvector of u (residual {residual:e})"
            )));
        }
    }
    Ok(())
}

fn check_connected(basis: &[Vec<C64>], coherent: &[Vec<C64>]) -> Result<()> {
    let d = basis.len();
    let amps: Vec<Vec<C64>> = coherent
        .iter()
        .map(|s| basis.iter().map(|b| inner(b, s)).collect())
        .collect();
    let mut reached = alloc::vec![false; d];
    reached[0] = true;
    let mut stack = alloc::vec![0usize];
    while let Some(i) = stack.pop() {
        for j in 0..d {
            if !reached[j] && amps.iter().any(|a| (a[i] * a[j].conj()).norm() > BASIS_TOL) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    match reached.iter().position(|r| !r) {
        None => Ok(()),
        Some(j) => Err(InstructionError::ConditionIII(format!(
            "coherence graph is disconnected: basis vector {j} is not reached"
        ))),
    }
}
