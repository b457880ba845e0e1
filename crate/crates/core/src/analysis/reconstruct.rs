use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use num_complex::ComplexFloat;
use num_traits::Euclid;

use crate::gates::{build_s, computational_povm, hadamard, pauli_x, s_gate, s_label, swap};
use crate::instructions::{gen_x1, gen_x2, ExpectedOutcomeTable, DEFAULT_EPS};
use crate::linalg::{hermitian_eig, kron, unitary_eig, DimsLayout, Matrix, C64};
use crate::model::{InstructionString, Label, QuantumChannel, QuantumModel};
use crate::quiz::{quiz_exhaustive, QuizViolation};

use super::channels::{matrix_unit, purity};
use super::equivalence::{gauge_residual, structure_check};
use super::subchannel::subchannel;
use super::unitarity::reconstruct_unitary_from_subchannels;
use super::{AnalysisError, GaugeResult, GaugeStep, Result, PURE_THRESHOLD};

const S1_RESIDUAL: f64 = 1e-8;
const S2_RESIDUAL: f64 = 1e-7;
const ANGLE_TOL: f64 = 1e-6;
const LOCALITY_TOL: f64 = 1e-7;
const UNITARY_TOL: f64 = 1e-7;

fn failed(step: GaugeStep, detail: impl ToString) -> AnalysisError {
    AnalysisError::StepFailed {
        step,
        detail: detail.to_string(),
    }
}

fn quiz_failure(step: GaugeStep, violations: &[&QuizViolation]) -> AnalysisError {
    AnalysisError::QuizFailure {
        step,
        strings: violations.iter().map(|v| v.string.to_string()).collect(),
    }
}

fn built_in_table(target: &QuantumModel, set: &crate::instructions::InstructionSet) -> ExpectedOutcomeTable {
    ExpectedOutcomeTable::from_target(target, set, DEFAULT_EPS).expect("built-in table")
}

/// Dominant eigenvector of a state, failing at `step` unless it is pure.
fn pure_vector(rho: &Matrix, step: GaugeStep, what: &str) -> Result<Vec<C64>> {
    let p = purity(rho);
    if p < PURE_THRESHOLD {
        return Err(failed(step, format!("{what} has purity {p}")));
    }
    let eig = hermitian_eig(rho, 1e-8)?;
    Ok(eig.vectors.column(rho.rows() - 1))
}

/// `diag(1, e^{i theta})`.
fn phase_diag(theta: f64) -> Matrix {
    Matrix::diag(&[C64::new(1.0, 0.0), C64::from_polar(1.0, theta)])
}

/// Maps angles to `(-1, 1]` in units of pi.
fn wrap_turns(x: f64) -> f64 {
    let y = Euclid::rem_euclid(&x, &2.0);
    if y > 1.0 {
        y - 2.0
    } else {
        y
    }
}

/// Rebuilds the gauge taking a single-qubit implementation onto the
/// one-qubit phase-gate model.
///
/// The implementation must pass the exhaustive quiz on `{ε, s s, s s s s}`.
/// The phase channel is diagonalised with eigenphases ordered in `[0, 2 pi)`;
/// a quarter turn between them gives `U = V D(theta)`, three quarters give
/// `U = V X D(-theta)`, where `theta` balances the initial state in the
/// eigenbasis. The returned matrix is `U^dagger`.
pub fn reconstruct_gauge_s1(imp: &QuantumModel) -> Result<GaugeResult> {
    let target = build_s(1).expect("built-in model");
    structure_check(&target, imp)?;
    let table = built_in_table(&target, &gen_x1());
    let report = quiz_exhaustive(imp, &table, DEFAULT_EPS)?;
    let (late, early): (Vec<&QuizViolation>, Vec<&QuizViolation>) =
        report.violations.iter().partition(|v| v.string.len() == 4);
    if !early.is_empty() {
        return Err(quiz_failure(GaugeStep::DistinguishedStates, &early));
    }

    let psi = pure_vector(imp.initial_state(), GaugeStep::DistinguishedStates, "initial state")?;
    let s = imp.channel(&s_label(1, 1)).expect("structure checked");
    let u_s = s
        .as_unitary(UNITARY_TOL)
        .ok_or_else(|| failed(GaugeStep::Unitarity, "phase channel is not unitary"))?;

    if !late.is_empty() {
        return Err(quiz_failure(GaugeStep::Eigenstructure, &late));
    }
    let eig = unitary_eig(&u_s, 1e-9)?;
    let mut pairs: Vec<(f64, Vec<C64>)> = eig
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (Euclid::rem_euclid(&v.arg(), &(2.0 * PI)), eig.vectors.column(k)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let alpha = pairs[1].0 - pairs[0].0;
    let k = num_traits::Float::round(alpha / (PI / 2.0));
    if (alpha - k * PI / 2.0).abs() > ANGLE_TOL || !(k == 1.0 || k == 3.0) {
        return Err(failed(
            GaugeStep::Eigenstructure,
            format!("eigenphase gap {alpha} is not a quarter or three-quarter turn"),
        ));
    }
    let v = Matrix::from_columns(&[pairs[0].1.clone(), pairs[1].1.clone()]);

    let w = v.adjoint().mat_vec(&psi)?;
    if (w[0].norm_sqr() - 0.5).abs() > ANGLE_TOL || (w[1].norm_sqr() - 0.5).abs() > ANGLE_TOL {
        return Err(failed(
            GaugeStep::Phase,
            format!("initial state weights {} and {}", w[0].norm_sqr(), w[1].norm_sqr()),
        ));
    }
    let theta = w[1].arg() - w[0].arg();
    let u = if k == 1.0 {
        v.matmul(&phase_diag(theta))?
    } else {
        v.matmul(&pauli_x())?.matmul(&phase_diag(-theta))?
    };
    let gauge = u.adjoint();
    let residual = gauge_residual(&target, imp, false, &gauge)?;
    if residual > S1_RESIDUAL {
        return Err(failed(GaugeStep::Residual, format!("residual {residual:e}")));
    }
    Ok(GaugeResult {
        antiunitary: false,
        matrix: gauge,
        residual,
    })
}

/// Parameters of the two-qubit reconstruction, in units of pi.
///
/// `r` and `s` give the relative single-qubit gauges `V_0^dagger V_1` and
/// `W_0^dagger W_1` as powers of `X` in `[0, 2)`, `t = r - s`, and `alpha`
/// and `beta` are the relative block phases of the two phase unitaries,
/// wrapped to `(-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S2Parameters {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
}

pub fn reconstruct_gauge_s2(imp: &QuantumModel) -> Result<GaugeResult> {
    Ok(reconstruct_gauge_s2_detailed(imp)?.0)
}

fn word(parts: &[(&Label, usize)]) -> InstructionString {
    let mut out = InstructionString::empty();
    for (l, count) in parts {
        out.extend(&InstructionString::repeat(l, *count));
    }
    out
}

/// Run lengths of a string, e.g. `s_a s_a s_b` gives `[2, 1]`.
fn runs(x: &InstructionString) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut prev: Option<&Label> = None;
    for l in x.labels() {
        if prev == Some(l) {
            *out.last_mut().expect("non-empty") += 1;
        } else {
            out.push(1);
        }
        prev = Some(l);
    }
    out
}

/// `X^p = |+><+| + e^{i pi p}|-><-|`.
fn x_power(p: f64) -> Result<Matrix> {
    let h = hadamard();
    Ok(h.matmul(&phase_diag(PI * p))?.matmul(&h)?)
}

/// Power of `X` relating two gauges, `a^dagger b ~ X^p`, with `p` in `[0, 2)`.
fn relative_x_power(a: &Matrix, b: &Matrix) -> Result<f64> {
    let h = hadamard();
    let m = h.matmul(&a.adjoint())?.matmul(b)?.matmul(&h)?;
    let off = m[(0, 1)].abs().max(m[(1, 0)].abs());
    if off > ANGLE_TOL {
        return Err(failed(
            GaugeStep::RelativeGauges,
            format!("relative gauge is not a power of X (off-diagonal {off:e})"),
        ));
    }
    Ok(Euclid::rem_euclid(&((m[(1, 1)] / m[(0, 0)]).arg() / PI), &2.0))
}

fn one_qubit_model(ch: QuantumChannel) -> Result<QuantumModel> {
    let zero = Matrix::diag(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    Ok(QuantumModel::new(zero, vec![(s_label(1, 1), ch)], computational_povm(1))?)
}

/// Rebuilds the gauge taking a two-qubit implementation onto the two-qubit
/// phase-gate model, and reports the intermediate parameters.
///
/// The four states reached by even powers fix a product basis and the
/// unitary `U_(x)` onto it; the local restrictions of both phase channels
/// are reconstructed as single-qubit models; purity of the alternating
/// states rules out decoherent action; the block phases and relative
/// gauges then give `Theta = C_hX^{-s} (V_0 (x) W_0)^dagger`, and the
/// returned matrix is `Theta U_(x)`.
pub fn reconstruct_gauge_s2_detailed(imp: &QuantumModel) -> Result<(GaugeResult, S2Parameters)> {
    let target = build_s(2).expect("built-in model");
    structure_check(&target, imp)?;
    let (la, lb) = (s_label(1, 2), s_label(2, 2));
    let table = built_in_table(&target, &gen_x2());
    let report = quiz_exhaustive(imp, &table, DEFAULT_EPS)?;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut alternating = Vec::new();
    for v in &report.violations {
        let r = runs(&v.string);
        if r.len() == 4 && r.iter().all(|&x| x == 1) {
            alternating.push(v);
        } else if r.iter().all(|&x| x % 2 == 0) {
            even.push(v);
        } else {
            odd.push(v);
        }
    }
    if !even.is_empty() {
        return Err(quiz_failure(GaugeStep::ProductBasis, &even));
    }

    // Product basis from the states reached by even powers.
    let mut psi = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let x = word(&[(&lb, 2 * j), (&la, 2 * i)]);
            let y = word(&[(&la, 2 * i), (&lb, 2 * j)]);
            let rho = imp.run_sequence(&x)?;
            let swapped = imp.run_sequence(&y)?;
            let dev = rho.distance(&swapped);
            if dev > LOCALITY_TOL {
                return Err(failed(
                    GaugeStep::ProductBasis,
                    format!("{x} and {y} reach different states ({dev:e})"),
                ));
            }
            psi.push(pure_vector(&rho, GaugeStep::ProductBasis, &format!("state after {x}"))?);
        }
    }
    let u_otimes = Matrix::from_fn(4, 4, |r, c| psi[r][c].conj());
    let dev = u_otimes.matmul(&u_otimes.adjoint())?.distance(&Matrix::identity(4));
    if dev > LOCALITY_TOL {
        return Err(failed(
            GaugeStep::ProductBasis,
            format!("reached states are not orthonormal ({dev:e})"),
        ));
    }
    if !odd.is_empty() {
        return Err(quiz_failure(GaugeStep::Subchannels, &odd));
    }
    let m = imp.conjugated_by(&u_otimes)?;
    let ch_a = m.channel(&la).expect("structure checked").clone();
    let ch_b = m.channel(&lb).expect("structure checked").clone();

    // Local restrictions, with the spectator basis state left in place.
    let layout = DimsLayout::qubits(2)?;
    let mut subs_a = Vec::with_capacity(2);
    let mut subs_b = Vec::with_capacity(2);
    for j in 0..2 {
        let anchor = matrix_unit(2, j, j);
        let sa = subchannel(&ch_a, &layout, 0, &anchor)
            .map_err(|e| failed(GaugeStep::Subchannels, e))?;
        let sb = subchannel(&ch_b, &layout, 1, &anchor)
            .map_err(|e| failed(GaugeStep::Subchannels, e))?;
        for b in 0..2 {
            for c in 0..2 {
                let e = matrix_unit(2, b, c);
                let da = ch_a
                    .apply(&kron(&e, &anchor))?
                    .distance(&kron(&sa.apply(&e)?, &anchor));
                let db = ch_b
                    .apply(&kron(&anchor, &e))?
                    .distance(&kron(&anchor, &sb.apply(&e)?));
                if da.max(db) > LOCALITY_TOL {
                    return Err(failed(
                        GaugeStep::Subchannels,
                        format!("a phase channel disturbs the spectator basis state {j}"),
                    ));
                }
            }
        }
        subs_a.push(sa.to_channel()?);
        subs_b.push(sb.to_channel()?);
    }

    let single = |ch: &QuantumChannel| -> Result<Matrix> {
        let g = reconstruct_gauge_s1(&one_qubit_model(ch.clone())?)
            .map_err(|e| failed(GaugeStep::SingleQubitGauges, e))?;
        Ok(g.matrix.adjoint())
    };
    let v: Vec<Matrix> = subs_a.iter().map(single).collect::<Result<_>>()?;
    let w: Vec<Matrix> = subs_b.iter().map(single).collect::<Result<_>>()?;

    let psi00 = matrix_unit(4, 0, 0);
    let after_a = ch_a.apply(&psi00)?;
    let after_b = ch_b.apply(&psi00)?;
    for (name, state) in [
        ("s_b s_a", ch_a.apply(&after_b)?),
        ("s_a s_b", ch_b.apply(&after_a)?),
    ] {
        let p = purity(&state);
        if p < PURE_THRESHOLD {
            return Err(failed(
                GaugeStep::Purity,
                format!("state after {name} has purity {p}"),
            ));
        }
    }
    let conj_s = |g: &Matrix| -> Result<Matrix> { Ok(g.matmul(&s_gate())?.matmul(&g.adjoint())?) };
    let ident = Matrix::identity(2);
    let unitary_b = reconstruct_unitary_from_subchannels(
        &ch_b,
        &layout,
        &ident,
        &[conj_s(&w[0])?, conj_s(&w[1])?],
        core::slice::from_ref(&after_a),
        1e-8,
    )
    .map_err(|e| failed(GaugeStep::Purity, e))?;
    let sw = swap();
    let unitary_a = reconstruct_unitary_from_subchannels(
        &ch_a.conjugated_by(&sw)?,
        &layout,
        &ident,
        &[conj_s(&v[0])?, conj_s(&v[1])?],
        &[sw.conjugate(&after_b)?],
        1e-8,
    )
    .map_err(|e| failed(GaugeStep::Purity, e))?;

    if !alternating.is_empty() {
        return Err(quiz_failure(GaugeStep::RelativeGauges, &alternating));
    }
    let r = relative_x_power(&v[0], &v[1])?;
    let s = relative_x_power(&w[0], &w[1])?;
    let params = S2Parameters {
        r,
        s,
        t: r - s,
        alpha: wrap_turns(unitary_a.phases[1] / PI),
        beta: wrap_turns(unitary_b.phases[1] / PI),
    };
    let bad: Vec<String> = [("t", params.t), ("alpha", params.alpha), ("beta", params.beta)]
        .iter()
        .filter(|(_, x)| wrap_turns(*x).abs() > ANGLE_TOL)
        .map(|(n, x)| format!("{n} = {x}"))
        .collect();
    if !bad.is_empty() {
        return Err(failed(GaugeStep::RelativeGauges, bad.join(", ")));
    }

    let plus = Matrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let minus = Matrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
    let controlled = &kron(&plus, &ident) + &kron(&minus, &x_power(-s)?);
    let theta = controlled.matmul(&kron(&v[0], &w[0]).adjoint())?;
    let gauge = theta.matmul(&u_otimes)?;
    let residual = gauge_residual(&target, imp, false, &gauge)?;
    if residual > S2_RESIDUAL {
        return Err(failed(GaugeStep::Residual, format!("residual {residual:e}")));
    }
    Ok((
        GaugeResult {
            antiunitary: false,
            matrix: gauge,
            residual,
        },
        params,
    ))
}
