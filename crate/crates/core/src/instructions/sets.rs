use alloc::format;
use alloc::vec::Vec;

use crate::gates::{h_label, s_label};
use crate::model::{InstructionString, Label};

use super::{InstructionError, InstructionSet, Result};

fn word(parts: &[(&Label, usize)]) -> InstructionString {
    let mut out = InstructionString::empty();
    for (l, count) in parts {
        out.extend(&InstructionString::repeat(l, *count));
    }
    out
}

/// `{ε, s s, s s s s}` for the single-qubit model.
pub fn gen_x1() -> InstructionSet {
    let s = s_label(1, 1);
    InstructionSet::from_strings("S_1", [0, 2, 4].map(|k| InstructionString::repeat(&s, k)))
}

/// Strings `s_b^{2j} s_a^i` and `s_a^{2i} s_b^j` with one exponent in
/// `{0, 1}` (doubled) and the other in `0..5`, plus `(s_a s_b)^2` and
/// `(s_b s_a)^2`. Nineteen strings after deduplication.
pub fn gen_x2() -> InstructionSet {
    let (a, b) = (s_label(1, 2), s_label(2, 2));
    let mut set = InstructionSet::new("S_2");
    for j in 0..2 {
        for i in 0..5 {
            set.push(word(&[(&b, 2 * j), (&a, i)]));
        }
    }
    for i in 0..2 {
        for j in 0..5 {
            set.push(word(&[(&a, 2 * i), (&b, j)]));
        }
    }
    set.push(word(&[(&a, 1), (&b, 1)]).power(2));
    set.push(word(&[(&b, 1), (&a, 1)]).power(2));
    set
}

/// The seven conditional-X tests: `s_a^{2i} s_b^{2j} cx` for `i, j` in
/// `{0, 1}`, then `s_b cx s_b`, `s_a cx s_a` and `s_a s_b s_b cx s_a`.
pub fn gen_xcx() -> InstructionSet {
    let (a, b) = (s_label(1, 2), s_label(2, 2));
    let cx = crate::gates::cx_label(2, 2);
    let mut set = InstructionSet::new("S_2+cx");
    for i in 0..2 {
        for j in 0..2 {
            set.push(word(&[(&a, 2 * i), (&b, 2 * j), (&cx, 1)]));
        }
    }
    set.push(word(&[(&b, 1), (&cx, 1), (&b, 1)]));
    set.push(word(&[(&a, 1), (&cx, 1), (&a, 1)]));
    set.push(word(&[(&a, 1), (&b, 2), (&cx, 1), (&a, 1)]));
    set
}

/// The fourteen Hadamard tests of the two-qubit Clifford model.
pub fn gen_xh() -> InstructionSet {
    gen_xh_n(2).expect("n = 2 is supported")
}

/// Hadamard tests for `n >= 2` qubits.
///
/// Every other qubit is put in `|+>` or `|->` by even powers of its phase
/// gate before one of `h`, `s1^2 h`, `h h`, `s1 h s1`, `s1^3 h s1`,
/// `h s1 h`; two further strings wrap `h` and `h h` in a phase gate on every
/// qubit. For two qubits this is exactly the fourteen-string set.
pub fn gen_xh_n(n: usize) -> Result<InstructionSet> {
    if n < 2 {
        return Err(InstructionError::UnsupportedSize(n));
    }
    let s1 = s_label(1, n);
    let h = h_label();
    let cores: [Vec<(&Label, usize)>; 6] = [
        alloc::vec![(&h, 1)],
        alloc::vec![(&s1, 2), (&h, 1)],
        alloc::vec![(&h, 2)],
        alloc::vec![(&s1, 1), (&h, 1), (&s1, 1)],
        alloc::vec![(&s1, 3), (&h, 1), (&s1, 1)],
        alloc::vec![(&h, 1), (&s1, 1), (&h, 1)],
    ];
    let others: Vec<Label> = (2..=n).map(|k| s_label(k, n)).collect();
    let mut set = InstructionSet::new(&format!("Cl_{n}"));
    for pattern in 0..1usize << (n - 1) {
        let mut prefix = InstructionString::empty();
        for (pos, l) in others.iter().enumerate() {
            if pattern & (1 << (n - 2 - pos)) != 0 {
                prefix.extend(&InstructionString::repeat(l, 2));
            }
        }
        for core in &cores {
            set.push(prefix.concat(&word(core)));
        }
    }
    let all: InstructionString =
        InstructionString::from_labels((1..=n).map(|k| s_label(k, n)).collect());
    for j in 1..=2 {
        set.push(all.concat(&InstructionString::repeat(&h, j)).concat(&all));
    }
    Ok(set)
}

/// Phase-gate tests for `n` qubits: `{ε, s^2, s^4}` for one qubit, the
/// nineteen-string set for two, and for `n >= 3` the local tests
/// `X^loc_{n,k}`, the cyclic strings `x_{n,k}`, `y_{n,k}` and the ladder
/// strings `X^G_{n,m}`.
pub fn gen_xn(n: usize) -> Result<InstructionSet> {
    match n {
        0 => return Err(InstructionError::UnsupportedSize(0)),
        1 => return Ok(gen_x1()),
        2 => return Ok(gen_x2()),
        _ => {}
    }
    let s: Vec<Label> = (1..=n).map(|k| s_label(k, n)).collect();
    let mut set = InstructionSet::new(&format!("S_{n}"));
    // X^loc_{n,k}: even powers on every other qubit, then s_k^{j_k}.
    for k in 0..n {
        let others: Vec<usize> = (0..n).filter(|&i| i != k).collect();
        for jk in 0..5 {
            for pattern in 0..1usize << (n - 1) {
                let mut x = InstructionString::empty();
                for (pos, &i) in others.iter().enumerate() {
                    if pattern & (1 << (n - 2 - pos)) != 0 {
                        x.extend(&InstructionString::repeat(&s[i], 2));
                    }
                }
                x.extend(&InstructionString::repeat(&s[k], jk));
                set.push(x);
            }
        }
    }
    // x_{n,k} = (s_{k-1} ... s_1 s_n ... s_k)^2.
    for k in 0..n {
        let order = (0..k).rev().chain((k..n).rev());
        let base = InstructionString::from_labels(order.map(|i| s[i].clone()).collect());
        set.push(base.power(2));
    }
    // y_{n,k} = (s_n ... s_1 s_k)^2.
    for k in 0..n {
        let mut base = InstructionString::from_labels((0..n).rev().map(|i| s[i].clone()).collect());
        base.push(s[k].clone());
        set.push(base.power(2));
    }
    // X^G_{n,m} = {s_n ... s_m s_l : l = m+1..n}.
    for m in 0..n - 1 {
        for l in m + 1..n {
            let mut x =
                InstructionString::from_labels((m..n).rev().map(|i| s[i].clone()).collect());
            x.push(s[l].clone());
            set.push(x);
        }
    }
    Ok(set)
}
