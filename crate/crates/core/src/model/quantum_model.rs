use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{hermitian_eig, Matrix, C64};

use super::povm::rank_one_vector;
use super::{
    InstructionString, Label, ModelError, OutcomeLabel, Povm, QuantumChannel, Result,
};

/// Initial state, ordered labelled channels and a POVM on one Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    initial_state: Matrix,
    channels: Vec<(Label, QuantumChannel)>,
    povm: Povm,
    pure_initial: Option<Vec<C64>>,
}

/// State reached by running an instruction string. Pure states are kept as
/// vectors for as long as only single-Kraus channels are applied.
enum RunState {
    Pure(Vec<C64>),
    Mixed(Matrix),
}

impl QuantumModel {
    /// Checks shapes and label uniqueness; numerical properties are checked by
    /// [`validate_model`].
    pub fn new(
        initial_state: Matrix,
        channels: Vec<(Label, QuantumChannel)>,
        povm: Povm,
    ) -> Result<Self> {
        let dim = povm.dim();
        if !initial_state.is_square() || initial_state.rows() != dim {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                found: initial_state.rows(),
            });
        }
        if !initial_state.is_finite() {
            return Err(ModelError::NonFinite);
        }
        let mut seen = BTreeSet::new();
        for (label, ch) in &channels {
            if !seen.insert(label.clone()) {
                return Err(ModelError::DuplicateLabel(label.as_str().into()));
            }
            if ch.dim() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    found: ch.dim(),
                });
            }
        }
        let pure_initial = rank_one_vector(&initial_state);
        Ok(Self {
            initial_state,
            channels,
            povm,
            pure_initial,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial_state.rows()
    }

    pub fn initial_state(&self) -> &Matrix {
        &self.initial_state
    }

    pub fn channels(&self) -> &[(Label, QuantumChannel)] {
        &self.channels
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    /// The initial state as a unit vector, when it is pure.
    pub fn pure_initial_state(&self) -> Option<Vec<C64>> {
        self.pure_initial.clone()
    }

    /// Channel labels in model order.
    pub fn alphabet(&self) -> impl Iterator<Item = &Label> {
        self.channels.iter().map(|(l, _)| l)
    }

    pub fn channel(&self, label: &Label) -> Option<&QuantumChannel> {
        self.channels
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, c)| c)
    }

    fn channel_or_err(&self, label: &Label) -> Result<&QuantumChannel> {
        self.channel(label)
            .ok_or_else(|| ModelError::UnknownLabel(label.as_str().into()))
    }

    fn run(&self, x: &InstructionString) -> Result<RunState> {
        let mut state = match &self.pure_initial {
            Some(v) => RunState::Pure(v.clone()),
            None => RunState::Mixed(self.initial_state.clone()),
        };
        for label in x.labels() {
            let ch = self.channel_or_err(label)?;
            state = match state {
                RunState::Pure(v) => match ch.apply_vector(&v) {
                    Some(w) => RunState::Pure(w),
                    None => RunState::Mixed(ch.apply(&Matrix::projector(&v))?),
                },
                RunState::Mixed(rho) => RunState::Mixed(ch.apply(&rho)?),
            };
        }
        Ok(state)
    }

    /// Final state after applying `x` to the initial state.
    pub fn run_sequence(&self, x: &InstructionString) -> Result<Matrix> {
        Ok(match self.run(x)? {
            RunState::Pure(v) => Matrix::projector(&v),
            RunState::Mixed(rho) => rho,
        })
    }

    /// Outcome probabilities after `x`, in POVM order.
    pub fn outcome_distribution(&self, x: &InstructionString) -> Result<Vec<(OutcomeLabel, f64)>> {
        let probs = match self.run(x)? {
            RunState::Pure(v) => self.povm.probabilities_pure(&v),
            RunState::Mixed(rho) => self.povm.probabilities(&rho),
        };
        Ok(self.povm.labels().cloned().zip(probs).collect())
    }

    /// Outcomes with probability strictly greater than `eps`.
    pub fn output_support(&self, x: &InstructionString, eps: f64) -> Result<OutputSupport> {
        Ok(OutputSupport(
            self.outcome_distribution(x)?
                .into_iter()
                .filter(|(_, p)| *p > eps)
                .map(|(l, _)| l)
                .collect(),
        ))
    }

    /// Copy of the model with one more channel appended to the alphabet.
    pub fn augment(&self, label: Label, channel: QuantumChannel) -> Result<Self> {
        let mut channels = self.channels.clone();
        channels.push((label, channel));
        Self::new(self.initial_state.clone(), channels, self.povm.clone())
    }

    /// Copy with the channel under `label` replaced.
    pub fn with_channel(&self, label: &Label, channel: QuantumChannel) -> Result<Self> {
        self.channel_or_err(label)?;
        let channels = self
            .channels
            .iter()
            .map(|(l, c)| {
                if l == label {
                    (l.clone(), channel.clone())
                } else {
                    (l.clone(), c.clone())
                }
            })
            .collect();
        Self::new(self.initial_state.clone(), channels, self.povm.clone())
    }

    /// Copy with a different initial state.
    pub fn with_initial_state(&self, rho: Matrix) -> Result<Self> {
        Self::new(rho, self.channels.clone(), self.povm.clone())
    }

    /// The model seen through the unitary gauge `u`: every element is
    /// conjugated by `u`.
    pub fn conjugated_by(&self, u: &Matrix) -> Result<Self> {
        let channels = self
            .channels
            .iter()
            .map(|(l, c)| Ok((l.clone(), c.conjugated_by(u)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            u.conjugate(&self.initial_state)?,
            channels,
            self.povm.conjugated_by(u)?,
        )
    }

    /// Entrywise complex conjugate of every element.
    pub fn complex_conjugate(&self) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|(l, c)| (l.clone(), c.complex_conjugate()))
            .collect();
        Self::new(
            self.initial_state.conj(),
            channels,
            self.povm.complex_conjugate(),
        )
        .expect("same shapes")
    }
}

/// Free-function form of [`QuantumModel::run_sequence`].
pub fn run_sequence(model: &QuantumModel, x: &InstructionString) -> Result<Matrix> {
    model.run_sequence(x)
}

/// Set of outcomes with probability above a threshold.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct OutputSupport(pub BTreeSet<OutcomeLabel>);

impl OutputSupport {
    pub fn contains(&self, label: &OutcomeLabel) -> bool {
        self.0.contains(label)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &OutcomeLabel> {
        self.0.iter()
    }

    pub fn is_singleton(&self) -> bool {
        self.0.len() == 1
    }
}

impl fmt::Display for OutputSupport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(l.as_str())?;
        }
        f.write_str("}")
    }
}

/// A state reachable from the initial state, with the shortest string found
/// that reaches it.
#[derive(Debug, Clone, PartialEq)]
pub struct AttainableState {
    pub state: Matrix,
    pub witness: InstructionString,
}

/// Distinct states reachable with at most `max_depth` channel applications,
/// in breadth-first order. States within Frobenius distance `dedup_tol` of an
/// earlier state are dropped.
pub fn attainable_states(
    model: &QuantumModel,
    max_depth: usize,
    dedup_tol: f64,
) -> Result<Vec<AttainableState>> {
    let mut found = alloc::vec![AttainableState {
        state: model.initial_state.clone(),
        witness: InstructionString::empty(),
    }];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::from([(0usize, 0usize)]);
    while let Some((idx, depth)) = queue.pop_front() {
        if depth == max_depth {
            continue;
        }
        for (label, ch) in &model.channels {
            let next = ch.apply(&found[idx].state)?;
            if found.iter().any(|s| s.state.distance(&next) <= dedup_tol) {
                continue;
            }
            let mut witness = found[idx].witness.clone();
            witness.push(label.clone());
            found.push(AttainableState {
                state: next,
                witness,
            });
            queue.push_back((found.len() - 1, depth + 1));
        }
    }
    Ok(found)
}

/// A failed numerical invariant of a model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelViolation {
    InitialStateNotHermitian { deviation: f64 },
    InitialStateTrace { trace: f64 },
    InitialStateNotPositive { min_eigenvalue: f64 },
    ChannelNotTracePreserving { label: Label, deviation: f64 },
    EffectNotHermitian { label: OutcomeLabel, deviation: f64 },
    EffectNotPositive { label: OutcomeLabel, min_eigenvalue: f64 },
    EffectsDoNotSumToIdentity { deviation: f64 },
    EigensolverFailure { context: String },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InitialStateNotHermitian { deviation } => {
                write!(f, "initial state not Hermitian (deviation {deviation:e})")
            }
            Self::InitialStateTrace { trace } => write!(f, "initial state has trace {trace}"),
            Self::InitialStateNotPositive { min_eigenvalue } => {
                write!(f, "initial state has eigenvalue {min_eigenvalue:e}")
            }
            Self::ChannelNotTracePreserving { label, deviation } => {
                write!(f, "channel {label} not trace preserving (deviation {deviation:e})")
            }
            Self::EffectNotHermitian { label, deviation } => {
                write!(f, "effect {label} not Hermitian (deviation {deviation:e})")
            }
            Self::EffectNotPositive {
                label,
                min_eigenvalue,
            } => write!(f, "effect {label} has eigenvalue {min_eigenvalue:e}"),
            Self::EffectsDoNotSumToIdentity { deviation } => {
                write!(f, "effects do not sum to identity (deviation {deviation:e})")
            }
            Self::EigensolverFailure { context } => write!(f, "eigensolver failed on {context}"),
        }
    }
}

fn min_eigenvalue(m: &Matrix) -> core::result::Result<f64, crate::linalg::LinalgError> {
    Ok(hermitian_eig(m, f64::INFINITY)?.values[0])
}

/// Checks that the initial state is a density matrix, every channel is trace
/// preserving and the POVM effects are positive and complete, all within
/// `tol`. Returns every violation found.
pub fn validate_model(model: &QuantumModel, tol: f64) -> Vec<ModelViolation> {
    let mut out = Vec::new();
    let rho = &model.initial_state;
    let dev = rho.hermiticity_deviation();
    if dev > tol {
        out.push(ModelViolation::InitialStateNotHermitian { deviation: dev });
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > tol {
        out.push(ModelViolation::InitialStateTrace { trace: tr });
    }
    if model.pure_initial.is_none() {
        match min_eigenvalue(rho) {
            Ok(e) if e < -tol => {
                out.push(ModelViolation::InitialStateNotPositive { min_eigenvalue: e })
            }
            Ok(_) => {}
            Err(_) => out.push(ModelViolation::EigensolverFailure {
                context: "initial state".into(),
            }),
        }
    }
    for (label, ch) in &model.channels {
        let dev = ch.tp_deviation();
        if dev > tol {
            out.push(ModelViolation::ChannelNotTracePreserving {
                label: label.clone(),
                deviation: dev,
            });
        }
    }
    let d = model.dim();
    let mut sum = Matrix::zeros(d, d);
    let rank_one = model.povm.rank_one_vectors().is_some();
    for (label, e) in model.povm.outcomes() {
        sum = &sum + e;
        let dev = e.hermiticity_deviation();
        if dev > tol {
            out.push(ModelViolation::EffectNotHermitian {
                label: label.clone(),
                deviation: dev,
            });
            continue;
        }
        if !rank_one {
            match min_eigenvalue(e) {
                Ok(m) if m < -tol => out.push(ModelViolation::EffectNotPositive {
                    label: label.clone(),
                    min_eigenvalue: m,
                }),
                Ok(_) => {}
                Err(_) => out.push(ModelViolation::EigensolverFailure {
                    context: format!("effect {label}"),
                }),
            }
        }
    }
    let dev = sum.distance(&Matrix::identity(d));
    if dev > tol {
        out.push(ModelViolation::EffectsDoNotSumToIdentity { deviation: dev });
    }
    out
}
