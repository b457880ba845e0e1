mod common;

use common::*;
use proptest::prelude::*;
use qsq_core::gates::{build_s, controlled_hx, pauli_x, pauli_y, pauli_z};
use qsq_core::model::{attainable_states, validate_model, ModelViolation};
use qsq_core::random::{random_channel, random_density_matrix, random_unitary};
use qsq_core::{
    InstructionString, Label, Matrix, ModelError, OutcomeLabel, Povm, QuantumChannel,
    QuantumModel, C64,
};

fn plus() -> Vec<C64> {
    let h = 1.0 / 2f64.sqrt();
    vec![r(h), r(h)]
}

fn plus_y() -> Vec<C64> {
    let h = 1.0 / 2f64.sqrt();
    vec![r(h), i(h)]
}

fn minus() -> Vec<C64> {
    let h = 1.0 / 2f64.sqrt();
    vec![r(h), r(-h)]
}

fn tensor(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

fn probability(m: &QuantumModel, x: &str, outcome: &str) -> f64 {
    m.outcome_distribution(&s(x))
        .unwrap()
        .into_iter()
        .find(|(l, _)| l.as_str() == outcome)
        .unwrap()
        .1
}

fn support(m: &QuantumModel, x: &str) -> Vec<String> {
    m.output_support(&s(x), 1e-9)
        .unwrap()
        .iter()
        .map(|l| l.as_str().to_string())
        .collect()
}

/// A model with random initial state, channels and a random projective
/// measurement.
fn random_model(seed: u64, d: usize) -> QuantumModel {
    let mut g = rng(seed);
    let rho = random_density_matrix(d, &mut g);
    let channels = ["a", "b", "c"]
        .iter()
        .enumerate()
        .map(|(k, l)| (Label::new(l).unwrap(), random_channel(d, k + 1, &mut g)))
        .collect();
    let u = random_unitary(d, &mut g);
    let labels = (0..d).map(|j| OutcomeLabel::new(&j.to_string()).unwrap()).collect();
    let povm = Povm::from_basis(labels, &u.columns()).unwrap();
    QuantumModel::new(rho, channels, povm).unwrap()
}

fn words(alphabet: &[&str], len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|w| alphabet.iter().map(move |l| format!("{w} {l}")))
            .collect();
    }
    out
}

#[test]
fn identity_channel_leaves_states_alone() {
    let mut g = rng(10);
    let rho = random_density_matrix(3, &mut g);
    assert_close(&QuantumChannel::identity(3).apply(&rho).unwrap(), &rho, 1e-15);
}

#[test]
fn z_conjugation_flips_plus() {
    let ch = QuantumChannel::unitary(pauli_z()).unwrap();
    assert_close(&ch.apply(&proj(&plus())).unwrap(), &proj(&minus()), 1e-15);
}

#[test]
fn pauli_twirl_is_fully_depolarizing() {
    let kraus: Vec<Matrix> = [Matrix::identity(2), pauli_x(), pauli_y(), pauli_z()]
        .iter()
        .map(|p| p.scale_re(0.5))
        .collect();
    let ch = QuantumChannel::new(kraus.clone()).unwrap();
    let mut g = rng(11);
    for _ in 0..10 {
        let rho = random_density_matrix(2, &mut g);
        let expected = Matrix::identity(2).scale_re(0.5);
        assert_close(&ch.apply(&rho).unwrap(), &expected, 1e-14);
        assert_close(&naive_apply(&kraus, &rho), &expected, 1e-14);
    }
}

#[test]
fn apply_matches_kraus_sum() {
    let mut g = rng(12);
    let ch = random_channel(4, 3, &mut g);
    let rho = random_density_matrix(4, &mut g);
    let out = ch.apply(&rho).unwrap();
    assert_close(&out, &naive_apply(ch.kraus(), &rho), 1e-13);
    assert!((out.trace().re - 1.0).abs() < 1e-9);
    assert!(ch.apply(&Matrix::identity(3)).is_err());
}

#[test]
fn run_sequence_examples() {
    let s1 = build_s(1).unwrap();
    assert_close(&s1.run_sequence(&s("")).unwrap(), &proj(&plus()), 1e-15);
    assert_close(&s1.run_sequence(&s("s s")).unwrap(), &proj(&minus()), 1e-14);
    let s2 = build_s(2).unwrap();
    let expected = proj(&tensor(&plus_y(), &plus_y()));
    assert_close(&s2.run_sequence(&s("s_a s_b")).unwrap(), &expected, 1e-14);
    assert!(matches!(
        s2.run_sequence(&s("s_c")),
        Err(ModelError::UnknownLabel(_))
    ));
}

#[test]
fn outcome_distribution_examples() {
    let s1 = build_s(1).unwrap();
    assert!((probability(&s1, "", "0") - 1.0).abs() < 1e-14);
    assert!(probability(&s1, "", "1").abs() < 1e-14);
    assert!((probability(&s1, "s", "0") - 0.5).abs() < 1e-14);
    assert!((probability(&s1, "s", "1") - 0.5).abs() < 1e-14);
    let s2 = build_s(2).unwrap();
    assert!((probability(&s2, "s_a s_a", "10") - 1.0).abs() < 1e-14);
}

#[test]
fn output_support_examples() {
    let s1 = build_s(1).unwrap();
    assert_eq!(support(&s1, "s s s s"), ["0"]);
    assert_eq!(support(&s1, "s"), ["0", "1"]);
    let s2 = build_s(2).unwrap();
    assert_eq!(support(&s2, "s_b s_b s_a"), ["01", "11"]);
}

#[test]
fn augment_extends_the_alphabet() {
    let s2 = build_s(2).unwrap();
    let cx = QuantumChannel::unitary(controlled_hx()).unwrap();
    let aug = s2.augment(Label::new("cx").unwrap(), cx.clone()).unwrap();
    let names: Vec<&str> = aug.alphabet().map(|l| l.as_str()).collect();
    assert_eq!(names, ["s_a", "s_b", "cx"]);
    assert!(matches!(
        s2.augment(Label::new("s_a").unwrap(), cx),
        Err(ModelError::DuplicateLabel(_))
    ));
    for w in words(&["s_a", "s_b"], 3) {
        let before = s2.outcome_distribution(&s(&w)).unwrap();
        let after = aug.outcome_distribution(&s(&w)).unwrap();
        assert_eq!(before, after);
    }
}

#[test]
fn attainable_states_of_s1() {
    let s1 = build_s(1).unwrap();
    let at0 = attainable_states(&s1, 0, 1e-9).unwrap();
    assert_eq!(at0.len(), 1);
    assert_close(&at0[0].state, &proj(&plus()), 1e-15);
    let at4 = attainable_states(&s1, 4, 1e-9).unwrap();
    assert_eq!(at4.len(), 4);
    let h = 1.0 / 2f64.sqrt();
    let orbit = [
        plus(),
        plus_y(),
        minus(),
        vec![r(h), i(-h)],
    ];
    for (state, v) in at4.iter().zip(&orbit) {
        assert_close(&state.state, &proj(v), 1e-14);
        assert_close(&s1.run_sequence(&state.witness).unwrap(), &state.state, 1e-14);
    }
}

#[test]
fn attainable_states_of_s2() {
    let s2 = build_s(2).unwrap();
    // Every pair of exponents (i, j) in 0..4 needs i + j applications, so
    // the full product orbit appears at depth 6.
    assert_eq!(attainable_states(&s2, 4, 1e-9).unwrap().len(), 13);
    let all = attainable_states(&s2, 6, 1e-9).unwrap();
    assert_eq!(all.len(), 16);
    for (k, a) in all.iter().enumerate() {
        assert!((a.state.trace_product(&a.state).re - 1.0).abs() < 1e-12);
        for b in &all[..k] {
            assert!(a.state.distance(&b.state) > 1e-9);
        }
    }
}

#[test]
fn validate_accepts_targets() {
    for n in 1..=3 {
        assert!(validate_model(&build_s(n).unwrap(), 1e-9).is_empty());
    }
}

#[test]
fn validate_flags_a_povm_summing_to_two() {
    let s1 = build_s(1).unwrap();
    let doubled = Povm::new(
        s1.povm()
            .outcomes()
            .iter()
            .map(|(l, e)| (l.clone(), e.scale_re(2.0)))
            .collect(),
    )
    .unwrap();
    let bad = QuantumModel::new(s1.initial_state().clone(), s1.channels().to_vec(), doubled).unwrap();
    let v = validate_model(&bad, 1e-9);
    assert_eq!(v.len(), 1, "{v:?}");
    assert!(matches!(v[0], ModelViolation::EffectsDoNotSumToIdentity { .. }));
}

#[test]
fn validate_flags_a_lossy_channel() {
    let s1 = build_s(1).unwrap();
    let lossy = QuantumChannel::unitary(Matrix::identity(2).scale_re((1.0 - 1e-3f64).sqrt())).unwrap();
    let bad = s1.with_channel(&Label::new("s").unwrap(), lossy).unwrap();
    let v = validate_model(&bad, 1e-9);
    assert_eq!(v.len(), 1, "{v:?}");
    assert!(matches!(v[0], ModelViolation::ChannelNotTracePreserving { .. }));
}

#[test]
fn labels_reject_whitespace() {
    assert!(Label::new("").is_err());
    assert!(Label::new("s a").is_err());
    assert_eq!(InstructionString::parse("ε").unwrap(), InstructionString::empty());
    assert_eq!(s("s_a  s_b").to_string(), "s_a s_b");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_law(seed in any::<u64>(), len in 0usize..7, cut in 0usize..7) {
        let m = random_model(seed, 3);
        let alphabet = ["a", "b", "c"];
        let labels: Vec<&str> = (0..len).map(|k| alphabet[(seed as usize >> (2 * k)) % 3]).collect();
        let cut = cut.min(len);
        let whole = s(&labels.join(" "));
        let prefix = s(&labels[..cut].join(" "));
        let mut state = m.run_sequence(&prefix).unwrap();
        for l in &labels[cut..] {
            state = m.channel(&Label::new(l).unwrap()).unwrap().apply(&state).unwrap();
        }
        prop_assert!(max_abs_diff(&state, &m.run_sequence(&whole).unwrap()) <= 1e-12);
    }

    #[test]
    fn distributions_are_normalized(seed in any::<u64>(), pick in any::<u64>()) {
        let m = random_model(seed, 2);
        let len = (pick % 7) as usize;
        let labels: Vec<&str> = (0..len).map(|k| ["a", "b", "c"][(pick as usize >> (3 + 2 * k)) % 3]).collect();
        let dist = m.outcome_distribution(&s(&labels.join(" "))).unwrap();
        prop_assert!(dist.iter().all(|(_, p)| *p >= -1e-12));
        prop_assert!((dist.iter().map(|(_, p)| p).sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn support_is_monotone_in_eps(seed in any::<u64>(), e1 in 1e-12f64..0.49, e2 in 1e-12f64..0.49) {
        let m = random_model(seed, 4);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        for w in ["", "a", "b c", "c a b"] {
            let big = m.output_support(&s(w), lo).unwrap();
            let small = m.output_support(&s(w), hi).unwrap();
            prop_assert!(small.iter().all(|o| big.contains(o)));
        }
    }

    #[test]
    fn target_supports_ignore_eps(exp in -12.0f64..-3.0, pick in any::<u64>()) {
        let eps = 10f64.powf(exp);
        let m = build_s(2).unwrap();
        let len = (pick % 7) as usize;
        let w: Vec<&str> = (0..len).map(|k| ["s_a", "s_b"][(pick as usize >> (3 + k)) % 2]).collect();
        let x = s(&w.join(" "));
        prop_assert_eq!(m.output_support(&x, eps).unwrap(), m.output_support(&x, 1e-9).unwrap());
    }
}
