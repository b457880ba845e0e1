//! Gauge equivalence search and the constructive one- and two-qubit gauges.

mod common;

use common::*;
use proptest::prelude::*;
use qsq_core::adversaries::{build_adversary, Adversary, AdversaryKind, AdversarySpec, BaseModel};
use qsq_core::analysis::*;
use qsq_core::gates::{build_s, build_sy, build_u, hadamard, pauli_x, s_gate, sy_frame_n, t_gate};
use qsq_core::random::{random_channel, random_density_matrix, random_unitary};
use qsq_core::{Label, Matrix, OutcomeLabel, Povm, QuantumChannel, QuantumModel};

fn with_phase_gate(gate: Matrix) -> QuantumModel {
    build_s(1)
        .unwrap()
        .with_channel(&Label::new("s").unwrap(), QuantumChannel::unitary(gate).unwrap())
        .unwrap()
}

fn single(kind: AdversaryKind, base: BaseModel) -> QuantumModel {
    match build_adversary(&AdversarySpec { kind, base }).unwrap() {
        Adversary::Single(m) => m,
        Adversary::Pair(..) => unreachable!(),
    }
}

/// Largest violation of `g b g^dagger = a` over the state, the effects and
/// the channels, computed with textbook products. Unitary channels are
/// compared up to a phase.
fn residual_oracle(a: &QuantumModel, b: &QuantumModel, antiunitary: bool, g: &Matrix) -> f64 {
    let b = if antiunitary { b.complex_conjugate() } else { b.clone() };
    let conj = |m: &Matrix| naive_mul(&naive_mul(g, m), &g.adjoint());
    let mut worst = max_abs_diff(&conj(b.initial_state()), a.initial_state());
    for (l, e) in a.povm().outcomes() {
        let (_, f) = b.povm().outcomes().iter().find(|(m, _)| m == l).unwrap();
        worst = worst.max(max_abs_diff(&conj(f), e));
    }
    for (l, ch) in a.channels() {
        let other = b.channel(l).unwrap();
        match (ch.as_unitary(1e-9), other.as_unitary(1e-9)) {
            (Some(u), Some(v)) => {
                let v = conj(&v);
                let k = (0..u.rows() * u.cols())
                    .max_by(|x, y| u.as_slice()[*x].norm().partial_cmp(&u.as_slice()[*y].norm()).unwrap())
                    .unwrap();
                let phase = v.as_slice()[k] / u.as_slice()[k];
                worst = worst.max(max_abs_diff(&v, &u.scale(phase / phase.norm())));
            }
            _ => {
                let mut rg = rng(99);
                for _ in 0..4 {
                    let rho = random_density_matrix(a.dim(), &mut rg);
                    let lhs = conj(&naive_apply(other.kraus(), &naive_mul(&naive_mul(&g.adjoint(), &rho), g)));
                    worst = worst.max(max_abs_diff(&lhs, &naive_apply(ch.kraus(), &rho)));
                }
            }
        }
    }
    worst
}

fn is_unitary_oracle(g: &Matrix) -> bool {
    max_abs_diff(&naive_mul(&g.adjoint(), g), &Matrix::identity(g.rows())) < 1e-9
}

#[test]
fn finds_a_hadamard_gauge() {
    let s1 = build_s(1).unwrap();
    let rotated = s1.conjugated_by(&hadamard()).unwrap();
    let g = check_equivalence(&s1, &rotated, false, 1e-9).unwrap().unwrap();
    assert!(!g.antiunitary && g.residual <= 1e-9);
    assert_proportional(&g.matrix, &hadamard(), 1e-9);
    assert!(residual_oracle(&s1, &rotated, false, &g.matrix) <= 1e-9);
}

#[test]
fn phase_gate_adjoint_is_gauge_equivalent_by_x() {
    let s1 = build_s(1).unwrap();
    let dag = with_phase_gate(s_gate().adjoint());
    let g = check_equivalence(&s1, &dag, false, 1e-9).unwrap().unwrap();
    assert_proportional(&g.matrix, &pauli_x(), 1e-9);
    assert!(residual_oracle(&s1, &dag, false, &g.matrix) <= 1e-9);
}

#[test]
fn t_and_tz_models_are_not_equivalent() {
    let Adversary::Pair(a, b) = build_adversary(&AdversarySpec {
        kind: AdversaryKind::TzAmbiguityPair,
        base: BaseModel::Cl(1),
    })
    .unwrap() else {
        unreachable!()
    };
    assert!(check_equivalence(&a, &b, true, 1e-6).unwrap().is_none());
    assert!(check_equivalence(&a, &b, false, 1e-6).unwrap().is_none());
}

#[test]
fn antiunitary_gauge_is_found() {
    let mut g = rng(30);
    let u2 = build_u(2).unwrap();
    let w = random_unitary(4, &mut g);
    let other = u2.conjugated_by(&w).unwrap().complex_conjugate();
    assert!(check_equivalence(&u2, &other, false, 1e-8).unwrap().is_none());
    let found = check_equivalence(&u2, &other, true, 1e-8).unwrap().unwrap();
    assert!(found.antiunitary);
    assert!(residual_oracle(&u2, &other, true, &found.matrix) <= 1e-8);
}

#[test]
fn y_model_is_the_s_model_in_another_frame() {
    for n in 1..=3 {
        let s = build_s(n).unwrap();
        let sy = build_sy(n).unwrap();
        let found = check_equivalence(&sy, &s, false, 1e-9).unwrap().unwrap();
        assert!(residual_oracle(&sy, &s, false, &found.matrix) <= 1e-9);
        assert!(gauge_residual(&sy, &s, false, &sy_frame_n(n)).unwrap() <= 1e-10);
    }
}

#[test]
fn structure_mismatch_is_an_error() {
    assert!(matches!(
        check_equivalence(&build_s(1).unwrap(), &build_s(2).unwrap(), false, 1e-9),
        Err(AnalysisError::StructureMismatch(_))
    ));
}

#[test]
fn s1_gauge_of_rotated_models() {
    let s1 = build_s(1).unwrap();
    let mut g = rng(31);
    for _ in 0..20 {
        let w = random_unitary(2, &mut g);
        let imp = s1.conjugated_by(&w).unwrap();
        let found = reconstruct_gauge_s1(&imp).unwrap();
        assert!(found.residual <= 1e-8);
        assert!(is_unitary_oracle(&found.matrix));
        assert!(residual_oracle(&s1, &imp, false, &found.matrix) <= 1e-8);
    }
}

#[test]
fn s1_gauge_of_adjoint_variant_contains_x() {
    let s1 = build_s(1).unwrap();
    let dag = with_phase_gate(s_gate().adjoint());
    let found = reconstruct_gauge_s1(&dag).unwrap();
    assert_proportional(&found.matrix, &pauli_x(), 1e-9);
    assert!(residual_oracle(&s1, &dag, false, &found.matrix) <= 1e-8);
}

#[test]
fn s1_gauge_rejects_t_variant() {
    let err = reconstruct_gauge_s1(&with_phase_gate(t_gate())).unwrap_err();
    match err {
        AnalysisError::QuizFailure { step, strings } => {
            assert_eq!(step, GaugeStep::DistinguishedStates);
            assert_eq!(strings, ["s s"]);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn s1_gauge_rejects_non_unitary_channel() {
    // Replacing every state by |-> passes the first two tests. For a
    // unitary, the last test would follow from the second, so the failure
    // is reported at the unitarity step.
    let minus = qsq_core::gates::ket_minus();
    let kraus = (0..2).map(|k| Matrix::outer(&minus, &basis_ket(k, 2))).collect();
    let ch = QuantumChannel::new(kraus).unwrap();
    let imp = build_s(1).unwrap().with_channel(&Label::new("s").unwrap(), ch).unwrap();
    let err = reconstruct_gauge_s1(&imp).unwrap_err();
    assert!(matches!(err, AnalysisError::StepFailed { step: GaugeStep::Unitarity, .. }), "{err:?}");
}

#[test]
fn s2_gauge_of_exact_model_is_identity() {
    let s2 = build_s(2).unwrap();
    let (found, p) = reconstruct_gauge_s2_detailed(&s2).unwrap();
    assert_proportional(&found.matrix, &Matrix::identity(4), 1e-9);
    for v in [p.r, p.s, p.t, p.alpha, p.beta] {
        assert!(v.abs() < 1e-9);
    }
}

#[test]
fn s2_gauge_of_rotated_models() {
    let s2 = build_s(2).unwrap();
    let mut g = rng(32);
    for _ in 0..10 {
        let w = random_unitary(4, &mut g);
        let imp = s2.conjugated_by(&w).unwrap();
        let found = reconstruct_gauge_s2(&imp).unwrap();
        assert!(found.residual <= 1e-7);
        assert!(is_unitary_oracle(&found.matrix));
        assert!(residual_oracle(&s2, &imp, false, &found.matrix) <= 1e-7);
    }
}

#[test]
fn s2_gauge_of_decoherent_model_fails_purity() {
    let imp = single(AdversaryKind::DecoherentConditional, BaseModel::S(2));
    let err = reconstruct_gauge_s2(&imp).unwrap_err();
    assert!(matches!(err, AnalysisError::StepFailed { step: GaugeStep::Purity, .. }), "{err:?}");
}

#[test]
fn s2_gauge_attributes_quiz_failures() {
    let imp = single(AdversaryKind::WrongInitialState, BaseModel::S(2));
    assert!(matches!(reconstruct_gauge_s2(&imp), Err(AnalysisError::QuizFailure { .. })));
}

/// A random model with rank-one effects.
fn random_model(seed: u64) -> QuantumModel {
    let mut g = rng(seed);
    let d = 2;
    let rho = random_density_matrix(d, &mut g);
    let channels = vec![
        (Label::new("a").unwrap(), QuantumChannel::unitary(random_unitary(d, &mut g)).unwrap()),
        (Label::new("b").unwrap(), random_channel(d, 2, &mut g)),
    ];
    let u = random_unitary(d, &mut g);
    let labels = vec![OutcomeLabel::new("0").unwrap(), OutcomeLabel::new("1").unwrap()];
    QuantumModel::new(rho, channels, Povm::from_basis(labels, &u.columns()).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equivalence_is_reflexive(seed in any::<u64>()) {
        let m = random_model(seed);
        let g = check_equivalence(&m, &m, false, 1e-9).unwrap().unwrap();
        prop_assert!(g.residual <= 1e-9);
        prop_assert!(phase_aligned(&g.matrix, &Matrix::identity(2)) <= 1e-9);
    }

    #[test]
    fn equivalence_verdict_is_symmetric(seed in any::<u64>(), related in any::<bool>()) {
        let a = random_model(seed);
        let b = if related {
            a.conjugated_by(&random_unitary(2, &mut rng(seed ^ 1))).unwrap()
        } else {
            random_model(seed.wrapping_add(1))
        };
        let ab = check_equivalence(&a, &b, true, 1e-8).unwrap();
        let ba = check_equivalence(&b, &a, true, 1e-8).unwrap();
        prop_assert_eq!(ab.is_some(), ba.is_some());
        prop_assert_eq!(ab.is_some(), related);
        if let Some(g) = ab {
            prop_assert!(residual_oracle(&a, &b, g.antiunitary, &g.matrix) <= 1e-8);
        }
    }
}

fn phase_aligned(a: &Matrix, b: &Matrix) -> f64 {
    qsq_core::linalg::phase_aligned_distance(a, b).unwrap()
}
