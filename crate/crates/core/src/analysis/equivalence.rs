use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::ComplexFloat;

use crate::linalg::{hermitian_eig, normalize, phase_aligned_distance, vec_norm, Matrix, C64};
use crate::model::{povm::rank_one_vector, QuantumChannel, QuantumModel};

use super::{AnalysisError, Result};

/// Eigenvalues of an effect below this are dropped.
const EIGEN_FLOOR: f64 = 1e-9;
/// Nonzero eigenvalues of one effect closer than this count as degenerate.
const DEGENERACY_GAP: f64 = 1e-6;
/// Constraints weaker than this do not link two phases.
const WEIGHT_FLOOR: f64 = 1e-10;
/// Rounds of local phase refinement after the spanning-tree fit.
const REFINE_ROUNDS: usize = 20;
/// Largest number of sign branches tried when merging components.
const MAX_BRANCHES: usize = 1 << 10;
/// Above this dimension channel distances avoid forming superoperators.
const DENSE_SUPEROPERATOR_MAX_DIM: usize = 16;

/// An (anti-)unitary gauge taking model `b` onto model `a`.
///
/// When `antiunitary` is set, `b` is complex conjugated in the computational
/// basis before `matrix` is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeResult {
    pub antiunitary: bool,
    pub matrix: Matrix,
    pub residual: f64,
}

pub(super) fn structure_check(a: &QuantumModel, b: &QuantumModel) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(AnalysisError::StructureMismatch(format!(
            "dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let la: Vec<_> = a.alphabet().collect();
    let lb: Vec<_> = b.alphabet().collect();
    if la.len() != lb.len() || la.iter().any(|l| b.channel(l).is_none()) {
        return Err(AnalysisError::StructureMismatch("alphabets differ".into()));
    }
    let oa: alloc::collections::BTreeSet<_> = a.povm().labels().collect();
    let ob: alloc::collections::BTreeSet<_> = b.povm().labels().collect();
    if oa != ob || a.povm().len() != b.povm().len() {
        return Err(AnalysisError::StructureMismatch("outcome labels differ".into()));
    }
    Ok(())
}

fn channel_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    if let (Some(ua), Some(ub)) = (a.as_unitary(1e-9), b.as_unitary(1e-9)) {
        return Ok(phase_aligned_distance(&ua, &ub)?);
    }
    if a.dim() <= DENSE_SUPEROPERATOR_MAX_DIM {
        return Ok(a.superoperator().distance(&b.superoperator()));
    }
    // ||sum K (x) conj(K) - sum L (x) conj(L)||^2 through Kraus overlaps.
    let gram = |x: &[Matrix], y: &[Matrix]| -> f64 {
        x.iter()
            .flat_map(|k| y.iter().map(move |l| k.adjoint().trace_product(l).norm_sqr()))
            .sum()
    };
    let d2 = gram(a.kraus(), a.kraus()) + gram(b.kraus(), b.kraus())
        - 2.0 * gram(a.kraus(), b.kraus());
    Ok(d2.max(0.0).sqrt())
}

/// Largest transformation error over the initial state, the effects
/// (matched by label) and the channels (matched by label) when `gauge` is
/// applied to `b`, after complex conjugation if `antiunitary`. Channels that
/// are both unitary are compared up to a global phase.
pub fn gauge_residual(
    a: &QuantumModel,
    b: &QuantumModel,
    antiunitary: bool,
    gauge: &Matrix,
) -> Result<f64> {
    structure_check(a, b)?;
    let conjugated;
    let b = if antiunitary {
        conjugated = b.complex_conjugate();
        &conjugated
    } else {
        b
    };
    let mut residual = gauge.conjugate(b.initial_state())?.distance(a.initial_state());
    for (label, ea) in a.povm().outcomes() {
        let eb = b
            .povm()
            .outcomes()
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, e)| e)
            .ok_or_else(|| AnalysisError::StructureMismatch(format!("missing outcome {label}")))?;
        residual = residual.max(gauge.conjugate(eb)?.distance(ea));
    }
    for (label, ca) in a.channels() {
        let cb = b
            .channel(label)
            .ok_or_else(|| AnalysisError::StructureMismatch(format!("missing label {label}")))?;
        residual = residual.max(channel_distance(ca, &cb.conjugated_by(gauge)?)?);
    }
    Ok(residual)
}

/// Eigenvectors of the effects with nonzero eigenvalue, grouped per effect
/// in POVM order and sorted by eigenvalue within an effect.
fn povm_eigenvectors(model: &QuantumModel) -> Result<Vec<Vec<(f64, Vec<C64>)>>> {
    let d = model.dim();
    let mut groups = Vec::new();
    let mut total = 0;
    for (label, effect) in model.povm().outcomes() {
        let mut vecs: Vec<(f64, Vec<C64>)> = match rank_one_vector(effect) {
            Some(v) => {
                let n = vec_norm(&v);
                vec![(n * n, normalize(&v))]
            }
            None => {
                let eig = hermitian_eig(effect, 1e-8)?;
                eig.values
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v > EIGEN_FLOOR)
                    .map(|(k, &v)| (v, eig.vectors.column(k)))
                    .collect()
            }
        };
        vecs.retain(|(v, _)| *v > EIGEN_FLOOR);
        vecs.sort_by(|x, y| x.0.total_cmp(&y.0));
        if vecs.windows(2).any(|w| w[1].0 - w[0].0 < DEGENERACY_GAP) {
            return Err(AnalysisError::Unsupported(format!(
                "effect {label} has a degenerate nonzero eigenvalue"
            )));
        }
        total += vecs.len();
        groups.push(vecs);
    }
    if total != d {
        return Err(AnalysisError::Unsupported(format!(
            "effects have {total} eigenvectors in dimension {d}"
        )));
    }
    let basis = Matrix::from_columns(
        &groups
            .iter()
            .flat_map(|g| g.iter().map(|(_, v)| v.clone()))
            .collect::<Vec<_>>(),
    );
    if basis.adjoint().matmul(&basis)?.distance(&Matrix::identity(d)) > 1e-6 {
        return Err(AnalysisError::Unsupported(
            "effect eigenvectors are not orthonormal".into(),
        ));
    }
    Ok(groups)
}

/// Model elements expressed in a basis: state and Kraus lists per label.
struct Local {
    rho: Matrix,
    kraus: Vec<Vec<Matrix>>,
}

fn localize(model: &QuantumModel, basis: &Matrix, order: &[&crate::model::Label]) -> Result<Local> {
    let adj = basis.adjoint();
    let to_local = |m: &Matrix| -> Result<Matrix> { Ok(adj.matmul(m)?.matmul(basis)?) };
    let rho = to_local(model.initial_state())?;
    let kraus = order
        .iter()
        .map(|l| {
            model
                .channel(l)
                .expect("structure checked")
                .kraus()
                .iter()
                .map(to_local)
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Local { rho, kraus })
}

/// `ch(|k><l|)[m][n]` from local Kraus operators.
fn entry(kraus: &[Matrix], k: usize, l: usize, m: usize, n: usize) -> C64 {
    kraus.iter().map(|kr| kr[(m, k)] * kr[(n, l)].conj()).sum()
}

/// Maximum-weight spanning forest (Prim) over `z[p][c] ~ e^{i(phi_p - phi_c)}`.
/// Returns the component of every vertex and phases relative to each
/// component's first vertex.
fn prim(z: &[Vec<C64>]) -> (Vec<usize>, Vec<f64>) {
    let d = z.len();
    let mut comp = vec![usize::MAX; d];
    let mut phase = vec![0.0; d];
    let mut count = 0;
    for root in 0..d {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = count;
        let mut best: Vec<(f64, usize)> = (0..d).map(|c| (z[root][c].abs(), root)).collect();
        loop {
            let next = (0..d)
                .filter(|&c| comp[c] == usize::MAX && best[c].0 > WEIGHT_FLOOR)
                .max_by(|&x, &y| best[x].0.total_cmp(&best[y].0));
            let Some(c) = next else { break };
            let p = best[c].1;
            comp[c] = count;
            phase[c] = phase[p] - z[p][c].arg();
            for t in 0..d {
                if comp[t] == usize::MAX && z[c][t].abs() > best[t].0 {
                    best[t] = (z[c][t].abs(), c);
                }
            }
        }
        count += 1;
    }
    (comp, phase)
}

/// Least-squares style refinement: `e^{i phi_n} ~ sum_m conj(z[m][n]) e^{i phi_m}`.
fn refine(z: &[Vec<C64>], comp: &[usize], phase: &mut [f64]) {
    let d = z.len();
    for _ in 0..REFINE_ROUNDS {
        for n in 0..d {
            let acc: C64 = (0..d)
                .filter(|&m| m != n && comp[m] == comp[n])
                .map(|m| z[m][n].conj() * C64::from_polar(1.0, phase[m]))
                .sum();
            if acc.abs() > WEIGHT_FLOOR {
                phase[n] = acc.arg();
            }
        }
    }
}

/// Candidate phase vectors `phi` with `a ~ D b D^dagger`, `D = diag(e^{i phi})`.
fn fit_phases(a: &Local, b: &Local) -> Vec<Vec<f64>> {
    let d = a.rho.rows();
    let mut z = vec![vec![C64::new(0.0, 0.0); d]; d];
    for m in 0..d {
        for n in 0..d {
            if m != n {
                z[m][n] += a.rho[(m, n)] * b.rho[(m, n)].conj();
            }
        }
    }
    for (ka, kb) in a.kraus.iter().zip(&b.kraus) {
        for k in 0..d {
            for m in 0..d {
                for n in 0..d {
                    if m != n {
                        z[m][n] += entry(ka, k, k, m, n) * entry(kb, k, k, m, n).conj();
                    }
                }
            }
        }
        for k in 0..d {
            for l in 0..d {
                if k == l {
                    continue;
                }
                for m in 0..d {
                    z[l][k] += entry(ka, k, l, m, m) * entry(kb, k, l, m, m).conj();
                }
            }
        }
    }
    let sym: Vec<Vec<C64>> = (0..d)
        .map(|m| (0..d).map(|n| z[m][n] + z[n][m].conj()).collect())
        .collect();
    let (comp, mut phase) = prim(&sym);
    refine(&sym, &comp, &mut phase);
    let components = comp.iter().max().map_or(0, |c| c + 1);
    if components <= 1 {
        return vec![phase];
    }

    // Four-term constraints between components.
    let mut single = vec![vec![C64::new(0.0, 0.0); components]; components];
    let mut double = vec![vec![C64::new(0.0, 0.0); components]; components];
    for (ka, kb) in a.kraus.iter().zip(&b.kraus) {
        for k in 0..d {
            for l in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        let mut coeff = vec![0i32; components];
                        coeff[comp[m]] += 1;
                        coeff[comp[n]] -= 1;
                        coeff[comp[k]] -= 1;
                        coeff[comp[l]] += 1;
                        let nonzero: Vec<usize> =
                            (0..components).filter(|&c| coeff[c] != 0).collect();
                        if nonzero.len() != 2 {
                            continue;
                        }
                        let ea = entry(ka, k, l, m, n);
                        let eb = entry(kb, k, l, m, n);
                        let local = phase[m] - phase[n] - phase[k] + phase[l];
                        let val = ea * eb.conj() * C64::from_polar(1.0, -local);
                        let (p, q) = if coeff[nonzero[0]] > 0 {
                            (nonzero[0], nonzero[1])
                        } else {
                            (nonzero[1], nonzero[0])
                        };
                        match (coeff[p], coeff[q]) {
                            (1, -1) => {
                                single[p][q] += val;
                                single[q][p] += val.conj();
                            }
                            (2, -2) => {
                                double[p][q] += val;
                                double[q][p] += val.conj();
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    let (super_comp, offset) = prim(&single);
    let supers = super_comp.iter().max().map_or(0, |c| c + 1);
    let mut dz = vec![vec![C64::new(0.0, 0.0); supers]; supers];
    for p in 0..components {
        for q in 0..components {
            let (sp, sq) = (super_comp[p], super_comp[q]);
            if sp != sq {
                let shift = 2.0 * (offset[p] - offset[q]);
                dz[sp][sq] += double[p][q] * C64::from_polar(1.0, -shift);
            }
        }
    }
    let (_, half) = prim(&dz);
    // half[s] is twice the offset of super-component s, up to a multiple of pi.
    let free = supers.saturating_sub(1).min(10);
    let branches = (1usize << free).min(MAX_BRANCHES);
    (0..branches)
        .map(|mask| {
            (0..d)
                .map(|v| {
                    let s = super_comp[comp[v]];
                    let flip = s >= 1 && s <= free && mask & (1 << (s - 1)) != 0;
                    phase[v]
                        + offset[comp[v]]
                        + half[s] / 2.0
                        + if flip { core::f64::consts::PI } else { 0.0 }
                })
                .collect()
        })
        .collect()
}

fn best_gauge(
    a: &QuantumModel,
    b: &QuantumModel,
    antiunitary: bool,
    ea: &Matrix,
    a_local: &Local,
    groups_a: &[Vec<(f64, Vec<C64>)>],
) -> Result<Option<GaugeResult>> {
    let b_eff = if antiunitary { b.complex_conjugate() } else { b.clone() };
    let groups_b = povm_eigenvectors(&b_eff)?;
    // Outcome labels match as sets; pair groups by label.
    let mut columns = Vec::new();
    for (label, _) in a.povm().outcomes() {
        let ia = a.povm().outcomes().iter().position(|(l, _)| l == label).expect("own label");
        let ib = b_eff.povm().outcomes().iter().position(|(l, _)| l == label).expect("checked");
        if groups_a[ia].len() != groups_b[ib].len() {
            return Ok(None);
        }
        columns.extend(groups_b[ib].iter().map(|(_, v)| v.clone()));
    }
    let fb = Matrix::from_columns(&columns);
    let order: Vec<_> = a.alphabet().collect();
    let b_local = localize(&b_eff, &fb, &order)?;
    let mut best: Option<GaugeResult> = None;
    for phases in fit_phases(a_local, &b_local) {
        let diag: Vec<C64> = phases.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        let u = ea.matmul(&Matrix::diag(&diag))?.matmul(&fb.adjoint())?;
        let residual = gauge_residual(a, b, antiunitary, &u)?;
        if best.as_ref().is_none_or(|g| residual < g.residual) {
            best = Some(GaugeResult {
                antiunitary,
                matrix: u,
                residual,
            });
        }
    }
    Ok(best)
}

/// Searches for an (anti-)unitary gauge taking `b` onto `a`.
///
/// Candidate basis maps pair the effect eigenvectors of both models by
/// outcome label and eigenvalue order; per-vector phases are fitted to the
/// state and channel matrix elements. With `allow_antiunitary` the search
/// is repeated on the complex conjugate of `b`. Returns the gauge with the
/// smallest residual if it is at most `tol`.
pub fn check_equivalence(
    a: &QuantumModel,
    b: &QuantumModel,
    allow_antiunitary: bool,
    tol: f64,
) -> Result<Option<GaugeResult>> {
    structure_check(a, b)?;
    let groups_a = povm_eigenvectors(a)?;
    let ea = Matrix::from_columns(
        &a.povm()
            .outcomes()
            .iter()
            .enumerate()
            .flat_map(|(i, _)| groups_a[i].iter().map(|(_, v)| v.clone()))
            .collect::<Vec<_>>(),
    );
    let order: Vec<_> = a.alphabet().collect();
    let a_local = localize(a, &ea, &order)?;
    let mut best: Option<GaugeResult> = None;
    let branches: &[bool] = if allow_antiunitary { &[false, true] } else { &[false] };
    for &anti in branches {
        if let Some(g) = best_gauge(a, b, anti, &ea, &a_local, &groups_a)? {
            if best.as_ref().is_none_or(|cur| g.residual < cur.residual) {
                best = Some(g);
            }
        }
    }
    Ok(best.filter(|g| g.residual <= tol))
}
