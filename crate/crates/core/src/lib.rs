//! Quantum system quizzing.
//!
//! A quiz checks a black-box device against a target model using only
//! instruction strings and measurement outcomes. This crate provides the
//! target models (`S_n`, `Cl_n`, `U_n`, `Sy_n`), the instruction-set
//! generators with their expected-outcome tables, the sampled and exhaustive
//! quiz runners, channel-analysis tools for certifying implementations up to
//! a gauge, and a catalog of adversarial models.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `num_traits::Float` supplies float methods without std; when std is
// linked its inherent methods take over and the import goes unused.

extern crate alloc;

pub mod adversaries;
pub mod analysis;
pub mod gates;
pub mod instructions;
pub mod linalg;
pub mod model;
pub mod quiz;
pub mod random;

pub use linalg::{c64, DimsLayout, LinalgError, Matrix, C64};
pub use model::{
    InstructionString, Label, ModelError, OutcomeLabel, OutputSupport, Povm, QuantumChannel,
    QuantumModel,
};
