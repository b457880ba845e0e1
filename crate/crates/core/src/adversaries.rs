//! Deviant models for soundness checks.
//!
//! Each adversary changes one element of a built-in model: a substituted or
//! over-rotated phase gate, depolarizing noise, a phase gate that decoheres
//! the other qubits, exchanged channels or a flipped initial qubit. The
//! `T`/`TZ` pair gives two inequivalent models with the same output map.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use thiserror::Error;

use crate::gates::{
    build_cl, build_s, build_sy, build_u, ket0, ket1, ket_minus, ket_plus, on_qubit, pauli_x,
    pauli_y, pauli_z, phase_gate, product_state, s_label, sy_frame, t_gate, t_label, GateError,
};
use crate::linalg::{embed, Matrix, C64};
use crate::model::{
    InstructionString, Label, ModelError, OutcomeLabel, OutputSupport, QuantumChannel, QuantumModel,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("adversary {kind} is not defined on {base}")]
    UnsupportedBase { kind: String, base: String },
    #[error("alphabets or outcome labels differ")]
    AlphabetMismatch,
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = core::result::Result<T, AdversaryError>;

/// Built-in model an adversary is derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseModel {
    S(usize),
    Cl(usize),
    U(usize),
    Sy(usize),
}

impl BaseModel {
    pub fn qubits(&self) -> usize {
        match *self {
            Self::S(n) | Self::Cl(n) | Self::U(n) | Self::Sy(n) => n,
        }
    }

    pub fn build(&self) -> Result<QuantumModel> {
        Ok(match *self {
            Self::S(n) => build_s(n)?,
            Self::Cl(n) => build_cl(n)?,
            Self::U(n) => build_u(n)?,
            Self::Sy(n) => build_sy(n)?,
        })
    }

    /// Single-qubit frame taking the phase-gate eigenbasis to the model's.
    fn frame(&self) -> Matrix {
        match self {
            Self::Sy(_) => sy_frame(),
            _ => Matrix::identity(2),
        }
    }

    /// Basis in which the model prepares and measures each qubit.
    fn reference_basis(&self) -> [Vec<C64>; 2] {
        match self {
            Self::Sy(_) => [ket0(), ket1()],
            _ => [ket_plus(), ket_minus()],
        }
    }
}

impl fmt::Display for BaseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::S(n) => write!(f, "S_{n}"),
            Self::Cl(n) => write!(f, "Cl_{n}"),
            Self::U(n) => write!(f, "U_{n}"),
            Self::Sy(n) => write!(f, "Sy_{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryKind {
    /// The first phase gate becomes `T`.
    TSubstitution,
    /// The first phase gate becomes `diag(1, e^{i(pi/2 + angle)})`, `angle` in `(0, pi)`.
    Overrotation { angle: f64 },
    /// Every phase gate is followed by depolarizing noise of `strength` in `(0, 1]`.
    Depolarizing { strength: f64 },
    /// The first phase gate also dephases the other qubits in the reference basis.
    DecoherentConditional,
    /// The channels of the first two phase gates are exchanged.
    SwappedLabels,
    /// The first qubit starts in the other reference state.
    WrongInitialState,
    /// The base model plus `t = T` on qubit 1, paired with `t = T Z`.
    TzAmbiguityPair,
}

impl AdversaryKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TSubstitution => "t_substitution",
            Self::Overrotation { .. } => "overrotation",
            Self::Depolarizing { .. } => "depolarizing",
            Self::DecoherentConditional => "decoherent_conditional",
            Self::SwappedLabels => "swapped_labels",
            Self::WrongInitialState => "wrong_initial_state",
            Self::TzAmbiguityPair => "tz_ambiguity_pair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub base: BaseModel,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Adversary {
    Single(QuantumModel),
    Pair(QuantumModel, QuantumModel),
}

fn unsupported(spec: &AdversarySpec) -> AdversaryError {
    AdversaryError::UnsupportedBase {
        kind: spec.kind.name().into(),
        base: format!("{}", spec.base),
    }
}

/// Replaces the channel of qubit 1's phase gate by `gate`, given in the
/// phase-gate eigenbasis.
fn replace_first_phase(base: &BaseModel, model: &QuantumModel, gate: &Matrix) -> Result<QuantumModel> {
    let n = base.qubits();
    let w = base.frame();
    let local = w.matmul(gate).and_then(|m| m.matmul(&w.adjoint())).expect("2x2");
    Ok(model.with_channel(
        &s_label(1, n),
        QuantumChannel::unitary(on_qubit(&local, 1, n)?)?,
    )?)
}

fn depolarized(channel: &QuantumChannel, k: usize, n: usize, p: f64) -> Result<QuantumChannel> {
    let u = channel.kraus()[0].clone();
    let mut kraus = vec![u.scale_re((1.0 - 0.75 * p).sqrt())];
    for sigma in [pauli_x(), pauli_y(), pauli_z()] {
        let s = on_qubit(&sigma, k, n)?;
        kraus.push(s.matmul(&u).expect("same size").scale_re((0.25 * p).sqrt()));
    }
    Ok(QuantumChannel::new(kraus)?)
}

/// Builds the adversary described by `spec`.
pub fn build_adversary(spec: &AdversarySpec) -> Result<Adversary> {
    let base = &spec.base;
    let n = base.qubits();
    let model = base.build()?;
    let single = |m: QuantumModel| Ok(Adversary::Single(m));
    match spec.kind {
        AdversaryKind::TSubstitution => single(replace_first_phase(base, &model, &t_gate())?),
        AdversaryKind::Overrotation { angle } => {
            if !(angle > 0.0 && angle < PI) {
                return Err(AdversaryError::InvalidParameter(format!(
                    "overrotation angle {angle} outside (0, pi)"
                )));
            }
            single(replace_first_phase(base, &model, &phase_gate(PI / 2.0 + angle))?)
        }
        AdversaryKind::Depolarizing { strength } => {
            if !(strength > 0.0 && strength <= 1.0) {
                return Err(AdversaryError::InvalidParameter(format!(
                    "depolarizing strength {strength} outside (0, 1]"
                )));
            }
            let mut m = model.clone();
            for k in 1..=n {
                let label = s_label(k, n);
                let ch = model.channel(&label).expect("built-in label");
                m = m.with_channel(&label, depolarized(ch, k, n, strength)?)?;
            }
            single(m)
        }
        AdversaryKind::DecoherentConditional => {
            if n < 2 {
                return Err(unsupported(spec));
            }
            let label = s_label(1, n);
            let u = model.channel(&label).expect("built-in label").kraus()[0].clone();
            let refs = base.reference_basis();
            let kraus = (0..1usize << (n - 1))
                .map(|j| {
                    let others: Vec<Vec<C64>> = (0..n - 1)
                        .map(|q| refs[(j >> (n - 2 - q)) & 1].clone())
                        .collect();
                    let proj = Matrix::projector(&product_state(&others));
                    let p = embed(&proj, &(2..=n).collect::<Vec<_>>(), n)?;
                    Ok(u.matmul(&p).expect("same size"))
                })
                .collect::<core::result::Result<Vec<_>, crate::linalg::LinalgError>>()
                .map_err(|e| AdversaryError::Model(e.into()))?;
            single(model.with_channel(&label, QuantumChannel::new(kraus)?)?)
        }
        AdversaryKind::SwappedLabels => {
            if n < 2 {
                return Err(unsupported(spec));
            }
            let (l1, l2) = (s_label(1, n), s_label(2, n));
            let c1 = model.channel(&l1).expect("built-in label").clone();
            let c2 = model.channel(&l2).expect("built-in label").clone();
            single(model.with_channel(&l1, c2)?.with_channel(&l2, c1)?)
        }
        AdversaryKind::WrongInitialState => {
            let refs = base.reference_basis();
            let mut qubits = vec![refs[0].clone(); n];
            qubits[0] = refs[1].clone();
            single(model.with_initial_state(Matrix::projector(&product_state(&qubits)))?)
        }
        AdversaryKind::TzAmbiguityPair => {
            let w = base.frame();
            let in_frame = |g: &Matrix| w.matmul(g).and_then(|m| m.matmul(&w.adjoint())).expect("2x2");
            let t = in_frame(&t_gate());
            let tz = in_frame(&t_gate().matmul(&pauli_z()).expect("2x2"));
            let a = model.augment(t_label(), QuantumChannel::unitary(on_qubit(&t, 1, n)?)?)?;
            let b = model.augment(t_label(), QuantumChannel::unitary(on_qubit(&tz, 1, n)?)?)?;
            Ok(Adversary::Pair(a, b))
        }
    }
}

/// Result of a bounded output-map comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputMapComparison {
    pub equal: bool,
    pub strings_checked: usize,
    /// First string, in length-then-alphabet order, whose supports differ.
    pub first_divergence: Option<Divergence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub string: InstructionString,
    pub support_a: OutputSupport,
    pub support_b: OutputSupport,
}

fn support(model: &QuantumModel, rho: &Matrix, eps: f64) -> OutputSupport {
    let probs = model.povm().probabilities(rho);
    OutputSupport(
        model
            .povm()
            .labels()
            .zip(probs)
            .filter(|(_, p)| *p > eps)
            .map(|(l, _)| l.clone())
            .collect::<BTreeSet<OutcomeLabel>>(),
    )
}

/// Compares the output supports of two models on every string of length at
/// most `max_len`, in length-then-alphabet order (alphabet order of `a`).
pub fn output_map_equality(
    a: &QuantumModel,
    b: &QuantumModel,
    max_len: usize,
    eps: f64,
) -> Result<OutputMapComparison> {
    let labels: Vec<Label> = a.alphabet().cloned().collect();
    let same_alphabet = labels.len() == b.alphabet().count()
        && labels.iter().all(|l| b.channel(l).is_some());
    let oa: BTreeSet<_> = a.povm().labels().collect();
    let ob: BTreeSet<_> = b.povm().labels().collect();
    if !same_alphabet || oa != ob || a.dim() != b.dim() {
        return Err(AdversaryError::AlphabetMismatch);
    }
    let mut frontier = vec![(
        InstructionString::empty(),
        a.initial_state().clone(),
        b.initial_state().clone(),
    )];
    let mut checked = 0;
    for len in 0..=max_len {
        for (x, ra, rb) in &frontier {
            checked += 1;
            let (sa, sb) = (support(a, ra, eps), support(b, rb, eps));
            if sa != sb {
                return Ok(OutputMapComparison {
                    equal: false,
                    strings_checked: checked,
                    first_divergence: Some(Divergence {
                        string: x.clone(),
                        support_a: sa,
                        support_b: sb,
                    }),
                });
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(frontier.len() * labels.len());
        for (x, ra, rb) in &frontier {
            for l in &labels {
                let mut y = x.clone();
                y.push(l.clone());
                let ca = a.channel(l).expect("checked");
                let cb = b.channel(l).expect("checked");
                next.push((y, ca.apply(ra)?, cb.apply(rb)?));
            }
        }
        frontier = next;
    }
    Ok(OutputMapComparison {
        equal: true,
        strings_checked: checked,
        first_divergence: None,
    })
}
