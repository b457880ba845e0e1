use alloc::format;
use alloc::vec::Vec;

use crate::gates::{
    build_cl, build_s, build_u, controlled_hx, controlled_s, cs_label, cx_label, h_label,
    on_qubits, s_label,
};
use crate::model::{InstructionString, Label, QuantumChannel, QuantumModel};

use super::{
    gen_augmentation_tests, gen_xcx, gen_xh_n, gen_xn, ExpectedOutcomeTable, InstructionError,
    InstructionSet, Result, DEFAULT_EPS,
};

fn from_labels(labels: &[Label]) -> InstructionString {
    InstructionString::from_labels(labels.to_vec())
}

/// Clifford word implementing the Hadamard gate on qubit `k` up to a global
/// phase: `h` for qubit 1, otherwise
/// `cx1k s1 sk cx1k h cx1k s1 sk cx1k`.
pub fn hadamard_word(k: usize, n: usize) -> InstructionString {
    if k == 1 {
        return from_labels(&[h_label()]);
    }
    let (cx, s1, sk) = (cx_label(k, n), s_label(1, n), s_label(k, n));
    let half = [cx.clone(), s1, sk, cx.clone()];
    let mut labels: Vec<Label> = half.to_vec();
    labels.push(h_label());
    labels.extend(half);
    from_labels(&labels)
}

/// String preparing the computational basis state with index `j` (qubit 1
/// most significant) from `|+>^n`: even phase-gate powers select `|+>` or
/// `|->` on each qubit, then a Hadamard word per qubit maps them to `|0>`
/// or `|1>`.
pub fn canonical_computational_prep(j: usize, n: usize) -> InstructionString {
    let mut x = phase_power_prep(
        &(0..n)
            .map(|q| if j & (1 << (n - 1 - q)) != 0 { 2 } else { 0 })
            .collect::<Vec<_>>(),
        n,
    );
    for k in 1..=n {
        x.extend(&hadamard_word(k, n));
    }
    x
}

/// `s1^{p_1} ... sn^{p_n}`.
fn phase_power_prep(powers: &[usize], n: usize) -> InstructionString {
    let mut x = InstructionString::empty();
    for (q, &p) in powers.iter().enumerate() {
        x.extend(&InstructionString::repeat(&s_label(q + 1, n), p));
    }
    x
}

fn hadamard_basis_preps(n: usize) -> Vec<InstructionString> {
    (0..1usize << n)
        .map(|j| {
            let powers: Vec<usize> = (0..n)
                .map(|q| if j & (1 << (n - 1 - q)) != 0 { 2 } else { 0 })
                .collect();
            phase_power_prep(&powers, n)
        })
        .collect()
}

/// Tests adding the conditional-X gate on qubits `(1, j)` to
/// `S_n + {cx12, ..., cx1(j-1)}`.
///
/// Eigen preparations are the `|+/->` product states. The coherent set has
/// qubits `(1, j)` in `|+, +_y>`, `|+_y, +>` or `|-, +_y>` and every other
/// qubit in `|+_y>`.
pub fn cx_augmentation(j: usize, n: usize) -> Result<(InstructionSet, ExpectedOutcomeTable)> {
    if n < 2 || j < 2 || j > n {
        return Err(InstructionError::UnsupportedSize(n));
    }
    let mut certified = build_s(n)?;
    for k in 2..j {
        certified = certified.augment(
            cx_label(k, n),
            QuantumChannel::unitary(on_qubits(&controlled_hx(), 1, k, n)?)?,
        )?;
    }
    let u = on_qubits(&controlled_hx(), 1, j, n)?;
    let coherent: Vec<InstructionString> = [(0, 1), (1, 0), (2, 1)]
        .iter()
        .map(|&(p1, pj)| {
            let powers: Vec<usize> = (1..=n)
                .map(|q| match q {
                    1 => p1,
                    q if q == j => pj,
                    _ => 1,
                })
                .collect();
            phase_power_prep(&powers, n)
        })
        .collect();
    gen_augmentation_tests(
        &certified,
        cx_label(j, n),
        &u,
        &hadamard_basis_preps(n),
        &coherent,
    )
}

/// Tests adding controlled-S on qubits `(1, 2)` to `Cl_n`.
///
/// Eigen preparations are the computational basis states; the coherent set
/// is `{|0+>, |+0>, |1+>}` with every other qubit in `|+>`.
pub fn cs_augmentation(n: usize) -> Result<(InstructionSet, ExpectedOutcomeTable)> {
    if n < 2 {
        return Err(InstructionError::UnsupportedSize(n));
    }
    let certified = build_cl(n)?;
    let u = on_qubits(&controlled_s(), 1, 2, n)?;
    let eigen: Vec<InstructionString> = (0..1usize << n)
        .map(|j| canonical_computational_prep(j, n))
        .collect();
    let s1 = s_label(1, n);
    let coherent = alloc::vec![
        hadamard_word(1, n),
        hadamard_word(2, n),
        InstructionString::repeat(&s1, 2).concat(&hadamard_word(1, n)),
    ];
    gen_augmentation_tests(&certified, cs_label(n), &u, &eigen, &coherent)
}

fn with_target(mut set: InstructionSet, target: &str) -> InstructionSet {
    set.set_target(target);
    set
}

/// Tests for the Clifford model `Cl_n`, `n >= 2`: the phase-gate tests, the
/// conditional-X tests and the Hadamard tests. For two qubits the
/// conditional-X tests are the fixed seven-string set.
pub fn gen_xcl(n: usize) -> Result<InstructionSet> {
    if n < 2 {
        return Err(InstructionError::UnsupportedSize(n));
    }
    let mut set = with_target(gen_xn(n)?, &format!("Cl_{n}"));
    if n == 2 {
        set.union_with(&gen_xcx());
    } else {
        for j in 2..=n {
            set.union_with(&cx_augmentation(j, n)?.0);
        }
    }
    set.union_with(&gen_xh_n(n)?);
    Ok(set)
}

fn target_table(target: &QuantumModel, set: &InstructionSet) -> Result<ExpectedOutcomeTable> {
    ExpectedOutcomeTable::from_target(target, set, DEFAULT_EPS)
}

/// Tests for the universal model `U_n`, `n >= 2`: the Clifford tests plus
/// the controlled-S tests, with the table computed on `U_n`.
pub fn gen_xu(n: usize) -> Result<(InstructionSet, ExpectedOutcomeTable)> {
    if n < 2 {
        return Err(InstructionError::UnsupportedSize(n));
    }
    let mut set = with_target(gen_xcl(n)?, &format!("U_{n}"));
    set.union_with(&cs_augmentation(n)?.0);
    let table = target_table(&build_u(n)?, &set)?;
    Ok((set, table))
}
