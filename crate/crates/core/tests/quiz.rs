mod common;

use common::*;
use proptest::prelude::*;
use qsq_core::adversaries::{build_adversary, Adversary, AdversaryKind, AdversarySpec, BaseModel};
use qsq_core::gates::{build_cl, build_s, build_sy, ket_minus, ket_plus, s_gate, t_gate};
use qsq_core::instructions::{gen_x1, gen_x2, gen_xcl, gen_xn, ExpectedOutcomeTable};
use qsq_core::quiz::*;
use qsq_core::{Label, QuantumChannel, QuantumModel};

fn with_phase_gate(gate: qsq_core::Matrix) -> QuantumModel {
    build_s(1)
        .unwrap()
        .with_channel(&Label::new("s").unwrap(), QuantumChannel::unitary(gate).unwrap())
        .unwrap()
}

fn x1_table() -> ExpectedOutcomeTable {
    ExpectedOutcomeTable::from_target(&build_s(1).unwrap(), &gen_x1(), 1e-9).unwrap()
}

fn x2_table() -> ExpectedOutcomeTable {
    ExpectedOutcomeTable::from_target(&build_s(2).unwrap(), &gen_x2(), 1e-9).unwrap()
}

fn violating(report: &QuizReport) -> Vec<String> {
    report.violations.iter().map(|v| v.string.to_string()).collect()
}

/// Rejection probability of each X1 string for a single-qubit phase gate
/// `g`, from the `+/-` measurement of `g^k |+>` computed here.
fn x1_detection_oracle(g: &qsq_core::Matrix) -> f64 {
    let plus = ket_plus();
    let minus = ket_minus();
    let mut total = 0.0;
    for (k, allowed_plus) in [(0, true), (2, false), (4, true)] {
        let mut v = plus.clone();
        for _ in 0..k {
            v = g.mat_vec(&v).unwrap();
        }
        let rho = proj(&v);
        let wrong = if allowed_plus { prob(&minus, &rho) } else { prob(&plus, &rho) };
        total += wrong / 3.0;
    }
    total
}

#[test]
fn target_passes_sampled_quiz() {
    let cfg = QuizConfig::uniform(10_000, 19, 5).unwrap();
    let report = quiz_sampled(&build_s(2).unwrap(), &x2_table(), &cfg).unwrap();
    assert!(report.accepted());
    assert_eq!(report.rounds_executed, 10_000);
    assert_eq!(report.per_string_stats.iter().map(|s| s.asked).sum::<usize>(), 10_000);
}

#[test]
fn t_substitution_fails_sampled_quiz() {
    let cfg = QuizConfig::uniform(100, 3, 9).unwrap();
    let report = quiz_sampled(&with_phase_gate(t_gate()), &x1_table(), &cfg).unwrap();
    assert!(!report.accepted());
    let v = report.first_violation.unwrap();
    assert!(["s s", "s s s s"].contains(&v.string.to_string().as_str()));
    assert_eq!(v.observed.len(), 1);
}

#[test]
fn zero_rounds_accept() {
    let cfg = QuizConfig::uniform(0, 3, 1).unwrap();
    let report = quiz_sampled(&with_phase_gate(t_gate()), &x1_table(), &cfg).unwrap();
    assert!(report.accepted());
    assert_eq!(report.rounds_executed, 0);
}

#[test]
fn exhaustive_examples() {
    let report = quiz_exhaustive(&build_s(2).unwrap(), &x2_table(), 1e-9).unwrap();
    assert!(report.accepted() && report.violations.is_empty());
    let report = quiz_exhaustive(&with_phase_gate(t_gate()), &x1_table(), 1e-9).unwrap();
    assert!(!report.accepted());
    assert_eq!(violating(&report), ["s s", "s s s s"]);
    let observed: Vec<Vec<&str>> = report
        .violations
        .iter()
        .map(|v| v.observed.iter().map(|o| o.as_str()).collect())
        .collect();
    assert_eq!(observed, [vec!["0", "1"], vec!["1"]]);
    let s_dagger = with_phase_gate(s_gate().adjoint());
    assert!(quiz_exhaustive(&s_dagger, &x1_table(), 1e-9).unwrap().accepted());
}

#[test]
fn detection_probability_examples() {
    let w = [1.0 / 3.0; 3];
    let table = x1_table();
    assert_eq!(detection_probability(&build_s(1).unwrap(), &table, &w).unwrap(), 0.0);
    let p = detection_probability(&with_phase_gate(t_gate()), &table, &w).unwrap();
    assert!((p - 0.5).abs() <= 1e-12);
    assert!((p - x1_detection_oracle(&t_gate())).abs() <= 1e-12);
    let p = detection_probability(&with_phase_gate(s_gate().adjoint()), &table, &w).unwrap();
    assert!(p.abs() <= 1e-12);
}

#[test]
fn detection_probability_matches_oracle_for_phase_gates() {
    for k in 0..16 {
        let alpha = k as f64 * std::f64::consts::PI / 8.0;
        let g = qsq_core::gates::phase_gate(alpha);
        let p = detection_probability(&with_phase_gate(g.clone()), &x1_table(), &[1.0 / 3.0; 3]).unwrap();
        assert!((p - x1_detection_oracle(&g)).abs() <= 1e-12, "alpha = {alpha}");
    }
}

#[test]
fn weights_are_validated() {
    assert!(QuizConfig::new(10, vec![0.5, 0.5, 0.0], 1).is_err());
    assert!(QuizConfig::new(10, vec![0.5, 0.6], 1).is_err());
    assert!(QuizConfig::new(10, vec![], 1).is_err());
    assert!(QuizConfig::uniform(10, 0, 1).is_err());
    let cfg = QuizConfig::uniform(10, 2, 1).unwrap();
    assert!(matches!(
        quiz_sampled(&build_s(1).unwrap(), &x1_table(), &cfg),
        Err(QuizError::InvalidWeights(_))
    ));
}

#[test]
fn missing_labels_are_errors() {
    let table = x2_table();
    assert!(matches!(
        quiz_exhaustive(&build_s(1).unwrap(), &table, 1e-9),
        Err(QuizError::UnknownLabel(_))
    ));
}

#[test]
fn rejection_frequency_follows_geometric_bound() {
    // Detection probability 1/2 per round, so N rounds reject with
    // probability 1 - 2^-N.
    let m = with_phase_gate(t_gate());
    let table = x1_table();
    let rounds = 2;
    let trials = 1000;
    let rejected = (0..trials)
        .filter(|&seed| {
            let cfg = QuizConfig::uniform(rounds, 3, seed).unwrap();
            !quiz_sampled(&m, &table, &cfg).unwrap().accepted()
        })
        .count();
    let q = 1.0 - 0.5f64.powi(rounds as i32);
    let sigma = (q * (1.0 - q) / trials as f64).sqrt();
    assert!(rejected as f64 / trials as f64 >= q - 3.0 * sigma, "{rejected}");
}

#[test]
fn completeness_on_built_in_targets() {
    let cases: Vec<(QuantumModel, ExpectedOutcomeTable)> = vec![
        (build_s(1).unwrap(), x1_table()),
        (build_s(2).unwrap(), x2_table()),
        (build_sy(3).unwrap(), ExpectedOutcomeTable::from_target(&build_sy(3).unwrap(), &gen_xn(3).unwrap(), 1e-9).unwrap()),
        (build_cl(2).unwrap(), ExpectedOutcomeTable::from_target(&build_cl(2).unwrap(), &gen_xcl(2).unwrap(), 1e-9).unwrap()),
    ];
    for (m, table) in &cases {
        for exp in [-12, -9, -6, -3] {
            let eps = 10f64.powi(exp);
            assert!(quiz_exhaustive(m, table, eps).unwrap().accepted(), "eps {eps}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_reports_are_reproducible(seed in any::<u64>(), rounds in 0usize..200) {
        let Adversary::Single(m) = build_adversary(&AdversarySpec {
            kind: AdversaryKind::Depolarizing { strength: 0.05 },
            base: BaseModel::S(2),
        }).unwrap() else { unreachable!() };
        let cfg = QuizConfig::uniform(rounds, 19, seed).unwrap();
        let a = quiz_sampled(&m, &x2_table(), &cfg).unwrap();
        let b = quiz_sampled(&m, &x2_table(), &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        if a.accepted() {
            prop_assert_eq!(a.rounds_executed, rounds);
            prop_assert!(a.first_violation.is_none());
        } else {
            prop_assert!(a.first_violation.is_some());
            prop_assert!(a.rounds_executed <= rounds);
        }
    }
}
