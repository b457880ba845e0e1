//! Quantum models: an initial state, labelled channels and a POVM.
//!
//! Running an instruction string applies the named channels left to right to
//! the initial state; measuring the result with the POVM gives the outcome
//! distribution, and the outcomes with probability above `eps` form the
//! output support.

mod channel;
mod labels;
pub(crate) mod povm;
mod quantum_model;

pub use channel::QuantumChannel;
pub use labels::{InstructionString, Label, OutcomeLabel};
pub use povm::Povm;
pub use quantum_model::{
    attainable_states, run_sequence, validate_model, AttainableState, ModelViolation,
    OutputSupport, QuantumModel,
};

use alloc::string::String;
use thiserror::Error;

use crate::linalg::LinalgError;

/// Errors raised while building or running models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid label {0:?}: labels are non-empty and contain no whitespace")]
    InvalidLabel(String),
    #[error("unknown channel label {0:?}")]
    UnknownLabel(String),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("channel has no Kraus operators")]
    EmptyChannel,
    #[error("POVM has no effects")]
    EmptyPovm,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite matrix entries")]
    NonFinite,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = core::result::Result<T, ModelError>;
