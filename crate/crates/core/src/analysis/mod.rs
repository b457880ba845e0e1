//! Channel analysis and gauge equivalence.
//!
//! Subchannels, coherence graphs and block-Kraus decompositions support the
//! structural facts used to certify an implementation. The gauge tools
//! search for, or constructively rebuild, the (anti-)unitary that maps an
//! implementation onto its target.

mod blocks;
mod channels;
mod coherence;
mod equivalence;
mod lemmas;
mod reconstruct;
mod subchannel;
mod unitarity;

pub use blocks::{kraus_block_structure, subchannel_homomorphism_check, BlockKraus};
pub use channels::{choi_matrix, kraus_from_choi, purity, superoperator_of_map};
pub use coherence::{coherence_graph, CoherenceGraph};
pub use equivalence::{check_equivalence, gauge_residual, GaugeResult};
pub use lemmas::{orthogonality_check, purity_nonincrease_check, support_propagation_min};
pub use reconstruct::{reconstruct_gauge_s1, reconstruct_gauge_s2, reconstruct_gauge_s2_detailed, S2Parameters};
pub use subchannel::{subchannel, Subchannel};
pub use unitarity::{
    check_channel_equals_unitary, check_channel_equals_unitary_in_basis,
    reconstruct_unitary_from_subchannels, UnitaryReconstruction,
};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::model::ModelError;
use crate::quiz::QuizError;

/// Default tolerance for logical predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// States with purity at or above this value count as pure.
pub const PURE_THRESHOLD: f64 = 1.0 - 1e-7;

/// Step of a constructive gauge reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeStep {
    /// Initial state and its orthogonal complement are distinguished.
    DistinguishedStates,
    /// The phase channel acts as a unitary.
    Unitarity,
    /// The phase unitary has eigenphases a quarter turn apart.
    Eigenstructure,
    /// The initial state is balanced in the eigenbasis.
    Phase,
    /// The four product states form an orthonormal basis.
    ProductBasis,
    /// Local channels act locally on the product basis.
    Subchannels,
    /// Single-qubit reconstructions of the subchannels.
    SingleQubitGauges,
    /// Alternating application keeps the state pure.
    Purity,
    /// Relative single-qubit gauges and the derived parameters.
    RelativeGauges,
    /// The assembled gauge fails the final residual check.
    Residual,
}

impl fmt::Display for GaugeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::DistinguishedStates => "distinguished states",
            Self::Unitarity => "unitarity",
            Self::Eigenstructure => "eigenstructure",
            Self::Phase => "phase",
            Self::ProductBasis => "product basis",
            Self::Subchannels => "subchannels",
            Self::SingleQubitGauges => "single-qubit gauges",
            Self::Purity => "purity",
            Self::RelativeGauges => "relative gauges",
            Self::Residual => "residual",
        };
        f.write_str(s)
    }
}

/// Errors raised by the analysis layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("not a state: {0}")]
    NotAState(String),
    #[error("map is not CPTP: {0}")]
    NotCptp(String),
    #[error("basis is not orthonormal (deviation {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("membership fails for basis vector {basis_index} with anchor {anchor_index} (deviation {deviation:e})")]
    Membership {
        basis_index: usize,
        anchor_index: usize,
        deviation: f64,
    },
    #[error("Kraus operators leave the block form (residual {residual:e})")]
    OffBlock { residual: f64 },
    #[error("condition (i) failed: {0}")]
    ConditionI(String),
    #[error("condition (ii) failed: {0}")]
    ConditionII(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("structural mismatch: {0}")]
    StructureMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("quiz failed at step {step} on {strings:?}")]
    QuizFailure { step: GaugeStep, strings: Vec<String> },
    #[error("step {step} failed: {detail}")]
    StepFailed { step: GaugeStep, detail: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quiz(#[from] QuizError),
}

pub type Result<T> = core::result::Result<T, AnalysisError>;
