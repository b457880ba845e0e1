//! Subchannels, coherence graphs, block-Kraus forms and the channel lemmas.

mod common;

use common::*;
use proptest::prelude::*;
use qsq_core::analysis::*;
use qsq_core::gates::{
    controlled_hx, hadamard, ket0, ket1, ket_minus, ket_plus, ket_plus_y, pauli_x, pauli_z,
    product_basis, s_gate, swap,
};
use qsq_core::linalg::{kron, kron_vec, phase_aligned_distance, DimsLayout};
use qsq_core::random::{random_channel, random_density_matrix, random_pure_state, random_unitary};
use qsq_core::{Matrix, QuantumChannel};
use rand::Rng;

fn two() -> DimsLayout {
    DimsLayout::qubits(2).unwrap()
}

fn unitary(u: Matrix) -> QuantumChannel {
    QuantumChannel::unitary(u).unwrap()
}

fn hadamard_basis() -> Matrix {
    Matrix::from_columns(&[ket_plus(), ket_minus()])
}

fn computational_basis(d: usize) -> Matrix {
    Matrix::identity(d)
}

/// `sum_j K_j^i` blocks for a random channel per basis element of the first
/// subsystem: `K_j = sum_i |psi_i><psi_i| (x) K_j^i`.
fn random_block_channel<R: Rng>(basis: &Matrix, db: usize, kraus: usize, g: &mut R) -> QuantumChannel {
    let locals: Vec<QuantumChannel> = (0..basis.cols()).map(|_| random_channel(db, kraus, g)).collect();
    let ops = (0..kraus)
        .map(|j| {
            let mut acc = Matrix::zeros(basis.rows() * db, basis.rows() * db);
            for (i, local) in locals.iter().enumerate() {
                acc = &acc + &kron(&proj(&basis.column(i)), &local.kraus()[j]);
            }
            acc
        })
        .collect();
    QuantumChannel::new(ops).unwrap()
}

/// A random block channel whose blocks are unitaries.
fn random_block_unitary<R: Rng>(basis: &Matrix, db: usize, g: &mut R) -> (Matrix, Vec<Matrix>) {
    let us: Vec<Matrix> = (0..basis.cols()).map(|_| random_unitary(db, g)).collect();
    let mut acc = Matrix::zeros(basis.rows() * db, basis.rows() * db);
    for (i, u) in us.iter().enumerate() {
        acc = &acc + &kron(&proj(&basis.column(i)), u);
    }
    (acc, us)
}

fn superop_distance(a: &QuantumChannel, b: &QuantumChannel) -> f64 {
    a.superoperator().distance(&b.superoperator())
}

#[test]
fn subchannel_of_a_product_gate() {
    let mut g = rng(20);
    let ch = unitary(kron(&s_gate(), &Matrix::identity(2)));
    for _ in 0..3 {
        let anchor = random_density_matrix(2, &mut g);
        let sub = subchannel(&ch, &two(), 0, &anchor).unwrap();
        let sigma = random_density_matrix(2, &mut g);
        let expected = naive_apply(&[s_gate()], &sigma);
        assert_close(&sub.apply(&sigma).unwrap(), &expected, 1e-13);
    }
}

#[test]
fn subchannel_of_conditional_x_under_plus_control() {
    let ch = unitary(controlled_hx());
    let sub = subchannel(&ch, &two(), 1, &proj(&ket_plus())).unwrap();
    let mut g = rng(21);
    let sigma = random_density_matrix(2, &mut g);
    assert_close(&sub.apply(&sigma).unwrap(), &sigma, 1e-13);
    assert!(superop_distance(&sub.to_channel().unwrap(), &QuantumChannel::identity(2)) < 1e-12);
}

#[test]
fn subchannel_of_swap_is_constant() {
    let ch = unitary(swap());
    let sub = subchannel(&ch, &two(), 0, &proj(&ket0())).unwrap();
    let mut g = rng(22);
    for _ in 0..3 {
        let sigma = random_density_matrix(2, &mut g);
        assert_close(&sub.apply(&sigma).unwrap(), &proj(&ket0()), 1e-13);
    }
}

#[test]
fn subchannel_is_trace_preserving() {
    let mut g = rng(23);
    let ch = random_channel(6, 3, &mut g);
    let layout = DimsLayout::new(vec![2, 3]).unwrap();
    let sub = subchannel(&ch, &layout, 1, &random_density_matrix(2, &mut g)).unwrap();
    assert!(sub.to_channel().unwrap().tp_deviation() < 1e-9);
    assert!(subchannel(&ch, &layout, 0, &Matrix::identity(2)).is_err());
    assert!(subchannel(&ch, &layout, 2, &random_density_matrix(2, &mut g)).is_err());
}

#[test]
fn coherence_graph_examples() {
    let s2 = 1.0 / 2f64.sqrt();
    let pair = |a: usize, b: usize, d: usize| {
        let mut v = vec![r(0.0); d];
        v[a] = r(s2);
        v[b] = r(s2);
        proj(&v)
    };
    let g = coherence_graph(&computational_basis(4), &[pair(0, 1, 4), pair(1, 2, 4), pair(2, 3, 4)], 1e-9).unwrap();
    assert_eq!(g.edges(), [(0, 1), (1, 2), (2, 3)]);
    assert!(g.is_connected());
    let g = coherence_graph(&computational_basis(3), &[pair(0, 1, 3)], 1e-9).unwrap();
    assert!(!g.is_connected());
    assert!(!g.has_edge(0, 2) && !g.has_edge(1, 2));
    let bad = Matrix::from_columns(&[ket0(), ket_plus()]);
    assert!(matches!(
        coherence_graph(&bad, &[proj(&ket0())], 1e-9),
        Err(AnalysisError::NonOrthonormalBasis { .. })
    ));
}

#[test]
fn conditional_x_coherent_set_is_connected() {
    let basis = Matrix::from_columns(&product_basis(2, &ket_plus(), &ket_minus()));
    let states: Vec<Matrix> = [
        kron_vec(&ket_plus(), &ket_plus_y()),
        kron_vec(&ket_plus_y(), &ket_plus()),
        kron_vec(&ket_minus(), &ket_plus_y()),
    ]
    .iter()
    .map(|v| proj(v))
    .collect();
    let g = coherence_graph(&basis, &states, 1e-9).unwrap();
    assert!(g.is_connected());
    assert_eq!(g.spanning_tree().len(), 3);
}

#[test]
fn conditional_x_has_identity_and_x_blocks() {
    let bk = kraus_block_structure(&unitary(controlled_hx()), &two(), &hadamard_basis(), 1e-9).unwrap();
    assert_eq!(bk.blocks.len(), 1);
    assert_proportional(&bk.blocks[0][0], &Matrix::identity(2), 1e-12);
    assert_proportional(&bk.blocks[0][1], &pauli_x(), 1e-12);
}

#[test]
fn decoherent_channel_has_blocks() {
    let mut g = rng(24);
    let basis = hadamard_basis();
    let us = [random_unitary(2, &mut g), random_unitary(2, &mut g)];
    let kraus: Vec<Matrix> = (0..2).map(|j| kron(&proj(&basis.column(j)), &us[j])).collect();
    let ch = QuantumChannel::new(kraus).unwrap();
    let bk = kraus_block_structure(&ch, &two(), &basis, 1e-9).unwrap();
    assert!(superop_distance(&bk.to_channel().unwrap(), &ch) < 1e-9);
    for i in 0..2 {
        assert!(superop_distance(&bk.block_channel(i).unwrap(), &unitary(us[i].clone())) < 1e-9);
    }
}

#[test]
fn swap_fails_membership() {
    let err = kraus_block_structure(&unitary(swap()), &two(), &computational_basis(2), 1e-9).unwrap_err();
    assert!(matches!(err, AnalysisError::Membership { .. }), "{err:?}");
}

#[test]
fn homomorphism_examples() {
    let cx = unitary(controlled_hx());
    assert!(subchannel_homomorphism_check(&cx, &cx, &two(), &hadamard_basis(), 1e-9).unwrap());
    let mut g = rng(25);
    let a = random_block_channel(&hadamard_basis(), 2, 2, &mut g);
    let b = random_block_channel(&hadamard_basis(), 2, 3, &mut g);
    assert!(subchannel_homomorphism_check(&a, &b, &two(), &hadamard_basis(), 1e-9).unwrap());
    assert!(matches!(
        subchannel_homomorphism_check(&unitary(swap()), &cx, &two(), &computational_basis(2), 1e-9),
        Err(AnalysisError::Membership { .. })
    ));
}

#[test]
fn purity_examples() {
    let mut g = rng(26);
    let u = unitary(random_unitary(3, &mut g));
    assert!(purity_nonincrease_check(&u, &computational_basis(3), 100, &mut g).unwrap());
    let rho = random_density_matrix(3, &mut g);
    assert!((purity(&u.apply(&rho).unwrap()) - purity(&rho)).abs() < 1e-12);
    let dephase = QuantumChannel::new(vec![proj(&ket0()), proj(&ket1())]).unwrap();
    assert!((purity(&dephase.apply(&proj(&ket_plus())).unwrap()) - 0.5).abs() < 1e-14);
    assert!(purity_nonincrease_check(&dephase, &computational_basis(2), 100, &mut g).unwrap());
    let depolarize = QuantumChannel::new(
        [Matrix::identity(2), pauli_x(), qsq_core::gates::pauli_y(), pauli_z()]
            .iter()
            .map(|p| p.scale_re(0.5))
            .collect(),
    )
    .unwrap();
    assert!(purity_nonincrease_check(&depolarize, &computational_basis(2), 10, &mut g).is_err());
}

#[test]
fn orthogonality_examples() {
    let mut g = rng(27);
    let u = unitary(random_unitary(2, &mut g));
    let out = u.apply(&proj(&ket0())).unwrap().trace_product(&u.apply(&proj(&ket1())).unwrap());
    assert!(out.norm() < 1e-14);
    assert!(orthogonality_check(&u, 20, &mut g));
    let depolarize = QuantumChannel::new(
        [Matrix::identity(2), pauli_x(), qsq_core::gates::pauli_y(), pauli_z()]
            .iter()
            .map(|p| p.scale_re(0.5))
            .collect(),
    )
    .unwrap();
    let a = depolarize.apply(&proj(&ket0())).unwrap();
    let b = depolarize.apply(&proj(&ket1())).unwrap();
    assert!((a.trace_product(&b).re - 0.5).abs() < 1e-14);
    assert!(orthogonality_check(&depolarize, 20, &mut g));
    for _ in 0..100 {
        let d = g.random_range(2..5);
        let k = g.random_range(1..4);
        assert!(orthogonality_check(&random_channel(d, k, &mut g), 20, &mut g));
    }
}

#[test]
fn unitary_from_conditional_x_subchannels() {
    let coherent = [proj(&kron_vec(&ket_plus_y(), &ket_plus_y()))];
    let rec = reconstruct_unitary_from_subchannels(
        &unitary(controlled_hx()),
        &two(),
        &hadamard_basis(),
        &[Matrix::identity(2), pauli_x()],
        &coherent,
        1e-9,
    )
    .unwrap();
    assert!(phase_aligned_distance(&rec.unitary, &controlled_hx()).unwrap() < 1e-9);
    assert_eq!(rec.phases.len(), 2);
    assert!(rec.phases[0].abs() < 1e-12);
}

#[test]
fn unitary_from_product_subchannels() {
    let ss = kron(&s_gate(), &s_gate());
    let coherent = [proj(&kron_vec(&ket_plus(), &ket_plus()))];
    let rec = reconstruct_unitary_from_subchannels(
        &unitary(ss.clone()),
        &two(),
        &computational_basis(2),
        &[s_gate(), s_gate()],
        &coherent,
        1e-9,
    )
    .unwrap();
    assert!(phase_aligned_distance(&rec.unitary, &ss).unwrap() < 1e-9);
    // The block phases of S (x) S are 1 and i.
    let delta = rec.phases[1] - rec.phases[0];
    assert!((delta - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn decoherent_blocks_fail_condition_two() {
    let basis = hadamard_basis();
    let blocks = [Matrix::identity(2), pauli_x()];
    let kraus: Vec<Matrix> = (0..2).map(|j| kron(&proj(&basis.column(j)), &blocks[j])).collect();
    let ch = QuantumChannel::new(kraus).unwrap();
    let coherent = [proj(&kron_vec(&ket_plus_y(), &ket_plus_y()))];
    let err = reconstruct_unitary_from_subchannels(&ch, &two(), &basis, &[Matrix::identity(2), pauli_x()], &coherent, 1e-9)
        .unwrap_err();
    assert!(matches!(err, AnalysisError::ConditionII(_)), "{err:?}");
}

#[test]
fn channel_equals_unitary_examples() {
    let s = unitary(s_gate());
    assert!(check_channel_equals_unitary(&s, &s_gate(), &[proj(&ket_plus())], 1e-9).unwrap());
    let z = unitary(pauli_z());
    assert!(!check_channel_equals_unitary(&z, &s_gate(), &[proj(&ket_plus())], 1e-9).unwrap());
    let coherent: Vec<Matrix> = [
        kron_vec(&ket_plus(), &ket_plus_y()),
        kron_vec(&ket_plus_y(), &ket_plus()),
        kron_vec(&ket_minus(), &ket_plus_y()),
    ]
    .iter()
    .map(|v| proj(v))
    .collect();
    // The conditional-X gate is degenerate, so its eigenbasis is given.
    let basis = Matrix::from_columns(&[
        kron_vec(&ket_plus(), &ket0()),
        kron_vec(&ket_plus(), &ket1()),
        kron_vec(&ket_minus(), &ket_plus()),
        kron_vec(&ket_minus(), &ket_minus()),
    ]);
    let cx = unitary(controlled_hx());
    assert!(check_channel_equals_unitary_in_basis(&cx, &controlled_hx(), &basis, &coherent, 1e-9).unwrap());
    let hh = unitary(kron(&hadamard(), &Matrix::identity(2)));
    assert!(check_channel_equals_unitary_in_basis(&hh, &controlled_hx(), &basis, &coherent, 1e-9).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn block_channels_reassemble(seed in any::<u64>(), kraus in 1usize..4) {
        let mut g = rng(seed);
        let basis = random_unitary(2, &mut g);
        let ch = random_block_channel(&basis, 3, kraus, &mut g);
        let layout = DimsLayout::new(vec![2, 3]).unwrap();
        let bk = kraus_block_structure(&ch, &layout, &basis, 1e-9).unwrap();
        prop_assert!(superop_distance(&bk.to_channel().unwrap(), &ch) <= 1e-9);
    }

    #[test]
    fn block_channels_interchange(seed in any::<u64>()) {
        let mut g = rng(seed);
        let basis = random_unitary(2, &mut g);
        let ch = random_block_channel(&basis, 2, 2, &mut g);
        for i in 0..2 {
            let psi = proj(&basis.column(i));
            let rho = random_density_matrix(2, &mut g);
            let sub = subchannel(&ch, &two(), 1, &psi).unwrap();
            let lhs = ch.apply(&kron(&psi, &rho)).unwrap();
            let rhs = kron(&psi, &sub.apply(&rho).unwrap());
            prop_assert!(max_abs_diff(&lhs, &rhs) <= 1e-9);
        }
    }

    #[test]
    fn support_propagates_through_block_unitaries(seed in any::<u64>()) {
        let mut g = rng(seed);
        let basis_a = random_unitary(2, &mut g);
        let basis_b = random_unitary(2, &mut g);
        let phi0 = basis_b.column(0);
        let (u, blocks) = loop {
            let (u, blocks) = random_block_unitary(&basis_a, 2, &mut g);
            let ok = blocks.iter().all(|b| {
                let out = b.mat_vec(&phi0).unwrap();
                (0..2).all(|l| qsq_core::linalg::inner(&basis_b.column(l), &out).norm() > 0.05)
            });
            if ok { break (u, blocks); }
        };
        prop_assert_eq!(blocks.len(), 2);
        let rho = loop {
            let rho = proj(&random_pure_state(2, &mut g));
            if (0..2).all(|i| prob(&basis_a.column(i), &rho) > 0.05) { break rho; }
        };
        let min = support_propagation_min(&unitary(u), &two(), &basis_a, &basis_b, &rho, 0.05).unwrap();
        prop_assert!(min > 1e-6, "{}", min);
    }
}
