//! Instruction sets and their expected-outcome tables.
//!
//! Each generator returns the strings a quiz asks about. A table pairs every
//! string with the outcome bits that are checked and the values those bits
//! may take, computed from the target model.

mod augment;
mod sets;
mod universal;

pub use augment::{gen_augmentation_tests, gen_augmentation_tests_with, ComplementSearch};
pub use sets::{gen_x1, gen_x2, gen_xcx, gen_xh, gen_xh_n, gen_xn};
pub use universal::{
    canonical_computational_prep, cs_augmentation, cx_augmentation, gen_xcl, gen_xu, hadamard_word,
};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::gates::GateError;
use crate::model::{InstructionString, Label, ModelError, OutcomeLabel, OutputSupport, QuantumModel};

/// Default support threshold for expected-outcome tables.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Errors raised by the generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstructionError {
    #[error("instruction set not defined for n = {0}")]
    UnsupportedSize(usize),
    #[error("condition (i) failed: {0}")]
    ConditionI(String),
    #[error("condition (ii) failed: {0}")]
    ConditionII(String),
    #[error("condition (iii) failed: {0}")]
    ConditionIII(String),
    #[error("empty output support for {0}")]
    EmptySupport(String),
    #[error("label {0:?} is not in the target alphabet")]
    UnknownLabel(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Gate(#[from] GateError),
}

pub type Result<T> = core::result::Result<T, InstructionError>;

/// Ordered, duplicate-free list of instruction strings for one target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstructionSet {
    target: String,
    strings: Vec<InstructionString>,
    seen: BTreeSet<InstructionString>,
}

impl InstructionSet {
    pub fn new(target: &str) -> Self {
        Self {
            target: target.to_string(),
            strings: Vec::new(),
            seen: BTreeSet::new(),
        }
    }

    /// Builds a set, dropping later duplicates.
    pub fn from_strings(target: &str, strings: impl IntoIterator<Item = InstructionString>) -> Self {
        let mut set = Self::new(target);
        for s in strings {
            set.push(s);
        }
        set
    }

    /// Appends `s` unless it is already present; returns whether it was new.
    pub fn push(&mut self, s: InstructionString) -> bool {
        if self.seen.insert(s.clone()) {
            self.strings.push(s);
            true
        } else {
            false
        }
    }

    /// Appends every string of `other` not already present.
    pub fn union_with(&mut self, other: &InstructionSet) {
        for s in &other.strings {
            self.push(s.clone());
        }
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn set_target(&mut self, target: &str) {
        self.target = target.to_string();
    }

    pub fn strings(&self) -> &[InstructionString] {
        &self.strings
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn contains(&self, s: &InstructionString) -> bool {
        self.seen.contains(s)
    }

    /// Checks every label against the model's alphabet.
    pub fn check_labels(&self, model: &QuantumModel) -> Result<()> {
        for s in &self.strings {
            for l in s.labels() {
                if model.channel(l).is_none() {
                    return Err(InstructionError::UnknownLabel(l.as_str().into()));
                }
            }
        }
        Ok(())
    }
}

/// Expected outcome of one instruction string.
///
/// `checked` lists 0-based character positions of the outcome label (the
/// qubit index minus one for qubit models); an outcome is accepted when its
/// projection onto those positions is in `allowed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub string: InstructionString,
    pub checked: Vec<usize>,
    pub allowed: BTreeSet<String>,
}

impl TableEntry {
    /// Derives the entry from the target's support. Positions on which every
    /// supported outcome agrees are checked; if there are none, whole
    /// outcomes are checked against the full support.
    pub fn from_support(string: InstructionString, support: &OutputSupport) -> Result<Self> {
        let labels: Vec<Vec<char>> = support.iter().map(|l| l.as_str().chars().collect()).collect();
        let first = labels
            .first()
            .ok_or_else(|| InstructionError::EmptySupport(string.to_string()))?;
        let uniform_len = labels.iter().all(|l| l.len() == first.len());
        let fixed: Vec<usize> = if uniform_len {
            (0..first.len())
                .filter(|&p| labels.iter().all(|l| l[p] == first[p]))
                .collect()
        } else {
            Vec::new()
        };
        let checked = if fixed.is_empty() {
            (0..first.len()).collect()
        } else {
            fixed
        };
        let mut entry = Self {
            string,
            checked,
            allowed: BTreeSet::new(),
        };
        entry.allowed = support.iter().map(|l| entry.project(l)).collect();
        Ok(entry)
    }

    /// Characters of `outcome` at the checked positions.
    pub fn project(&self, outcome: &OutcomeLabel) -> String {
        let chars: Vec<char> = outcome.as_str().chars().collect();
        self.checked
            .iter()
            .map(|&p| chars.get(p).copied().unwrap_or('?'))
            .collect()
    }

    pub fn accepts(&self, outcome: &OutcomeLabel) -> bool {
        self.allowed.contains(&self.project(outcome))
    }

    /// True when the checked positions take a single value.
    pub fn is_deterministic(&self) -> bool {
        self.allowed.len() == 1
    }
}

/// Expected outcomes for every string of an instruction set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedOutcomeTable {
    target: String,
    entries: Vec<TableEntry>,
    index: BTreeMap<InstructionString, usize>,
}

impl ExpectedOutcomeTable {
    pub fn new(target: &str, entries: Vec<TableEntry>) -> Self {
        let mut table = Self {
            target: target.to_string(),
            entries: Vec::new(),
            index: BTreeMap::new(),
        };
        for e in entries {
            table.insert(e);
        }
        table
    }

    /// Computes the table of `set` from the target's output supports.
    pub fn from_target(target: &QuantumModel, set: &InstructionSet, eps: f64) -> Result<Self> {
        set.check_labels(target)?;
        let mut table = Self::new(set.target(), Vec::new());
        for s in set.strings() {
            let support = target.output_support(s, eps)?;
            table.insert(TableEntry::from_support(s.clone(), &support)?);
        }
        Ok(table)
    }

    /// Inserts or replaces the entry for its string.
    pub fn insert(&mut self, entry: TableEntry) {
        match self.index.get(&entry.string) {
            Some(&i) => self.entries[i] = entry,
            None => {
                self.index.insert(entry.string.clone(), self.entries.len());
                self.entries.push(entry);
            }
        }
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, s: &InstructionString) -> Option<&TableEntry> {
        self.index.get(s).map(|&i| &self.entries[i])
    }

    /// Instruction set formed by the table's strings, in table order.
    pub fn instruction_set(&self) -> InstructionSet {
        InstructionSet::from_strings(&self.target, self.entries.iter().map(|e| e.string.clone()))
    }

    /// Every label used by the table.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.entries
            .iter()
            .flat_map(|e| e.string.labels().iter().cloned())
            .collect()
    }
}
