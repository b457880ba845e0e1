use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::{ModelError, Result};

/// Name of a channel in a model's instruction alphabet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty() || name.chars().any(char::is_whitespace) || name == "ε" {
            return Err(ModelError::InvalidLabel(name.to_string()));
        }
        Ok(Self(name.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Name of a POVM outcome. For qubit models this is a bitstring, qubit 1
/// first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OutcomeLabel(String);

impl OutcomeLabel {
    pub fn new(name: &str) -> Result<Self> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidLabel(name.to_string()));
        }
        Ok(Self(name.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Finite sequence of channel labels, applied left to right.
///
/// Displayed space-separated; the empty string displays as `ε`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstructionString(Vec<Label>);

impl InstructionString {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_labels(labels: Vec<Label>) -> Self {
        Self(labels)
    }

    /// Parses a space-separated label list; `""` and `"ε"` give the empty
    /// string.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.is_empty() || trimmed == "ε" {
            return Ok(Self::empty());
        }
        trimmed
            .split_whitespace()
            .map(Label::new)
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// `label` repeated `count` times.
    pub fn repeat(label: &Label, count: usize) -> Self {
        Self((0..count).map(|_| label.clone()).collect())
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, label: Label) {
        self.0.push(label);
    }

    pub fn extend(&mut self, other: &InstructionString) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn concat(&self, other: &InstructionString) -> Self {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    /// The string repeated `count` times.
    pub fn power(&self, count: usize) -> Self {
        let mut out = Self::empty();
        for _ in 0..count {
            out.extend(self);
        }
        out
    }
}

impl fmt::Display for InstructionString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(l.as_str())?;
        }
        Ok(())
    }
}
