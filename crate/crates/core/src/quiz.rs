//! The quiz protocol: sampled rounds, the exhaustive ideal case and exact
//! detection probabilities.
//!
//! Each round draws an instruction string from the weights, draws an outcome
//! from the implementation's distribution and rejects as soon as the checked
//! bits of the outcome are not allowed by the table.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instructions::{ExpectedOutcomeTable, TableEntry};
use crate::model::{InstructionString, ModelError, OutcomeLabel, QuantumModel};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Errors raised by the quiz runners.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuizError {
    #[error("implementation has no channel {0:?} used by the table")]
    UnknownLabel(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = core::result::Result<T, QuizError>;

/// Number of rounds, sampling weights over the table and the RNG seed.
#[derive(Debug, Clone, PartialEq)]
pub struct QuizConfig {
    rounds: usize,
    weights: Vec<f64>,
    seed: u64,
}

impl QuizConfig {
    /// Weights must be positive and sum to one within `1e-12`.
    pub fn new(rounds: usize, weights: Vec<f64>, seed: u64) -> Result<Self> {
        validate_weights(&weights)?;
        Ok(Self {
            rounds,
            weights,
            seed,
        })
    }

    /// Uniform weights over `strings` entries.
    pub fn uniform(rounds: usize, strings: usize, seed: u64) -> Result<Self> {
        if strings == 0 {
            return Err(QuizError::InvalidWeights("empty table".into()));
        }
        Self::new(rounds, alloc::vec![1.0 / strings as f64; strings], seed)
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(QuizError::InvalidWeights("no weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
        return Err(QuizError::InvalidWeights(format!("weight {w} is not positive")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(QuizError::InvalidWeights(format!("weights sum to {sum}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuizMode {
    Sampled,
    Exhaustive,
}

/// A string whose observed outcomes left the allowed set.
///
/// In sampled mode `observed` holds the single sampled outcome; in
/// exhaustive mode it holds the implementation's whole support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuizViolation {
    pub string: InstructionString,
    pub observed: Vec<OutcomeLabel>,
    pub checked: Vec<usize>,
    pub allowed: BTreeSet<String>,
}

/// Times each string was asked, in table order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringStats {
    pub string: InstructionString,
    pub asked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuizReport {
    pub mode: QuizMode,
    pub verdict: Verdict,
    /// Rounds completed (sampled) or strings checked (exhaustive).
    pub rounds_executed: usize,
    pub first_violation: Option<QuizViolation>,
    /// Every violation; exhaustive mode only.
    pub violations: Vec<QuizViolation>,
    pub per_string_stats: Vec<StringStats>,
}

impl QuizReport {
    pub fn accepted(&self) -> bool {
        self.verdict == Verdict::Accept
    }
}

/// Fails when the implementation lacks a label used by the table.
pub fn check_alphabet(implementation: &QuantumModel, table: &ExpectedOutcomeTable) -> Result<()> {
    for l in table.labels() {
        if implementation.channel(&l).is_none() {
            return Err(QuizError::UnknownLabel(l.as_str().into()));
        }
    }
    Ok(())
}

fn sample_index(weights: impl Iterator<Item = f64>, u: f64) -> Option<usize> {
    let mut acc = 0.0;
    let mut last = None;
    for (i, w) in weights.enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(i);
        if u < acc {
            return Some(i);
        }
    }
    last
}

/// Runs `cfg.rounds()` rounds, stopping at the first violation. The result
/// depends only on the inputs and the seed.
pub fn quiz_sampled(
    implementation: &QuantumModel,
    table: &ExpectedOutcomeTable,
    cfg: &QuizConfig,
) -> Result<QuizReport> {
    check_alphabet(implementation, table)?;
    if cfg.weights.len() != table.len() {
        return Err(QuizError::InvalidWeights(format!(
            "{} weights for {} strings",
            cfg.weights.len(),
            table.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cache: Vec<Option<Vec<(OutcomeLabel, f64)>>> = alloc::vec![None; table.len()];
    let mut asked = alloc::vec![0usize; table.len()];
    let mut first_violation = None;
    let mut rounds_executed = 0;
    for _ in 0..cfg.rounds {
        let i = sample_index(cfg.weights.iter().copied(), rng.random::<f64>())
            .expect("weights validated");
        let entry = &table.entries()[i];
        if cache[i].is_none() {
            cache[i] = Some(implementation.outcome_distribution(&entry.string)?);
        }
        let dist = cache[i].as_ref().expect("filled");
        let total: f64 = dist.iter().map(|(_, p)| p).sum();
        let k = sample_index(dist.iter().map(|(_, p)| *p), rng.random::<f64>() * total)
            .expect("distribution has mass");
        asked[i] += 1;
        rounds_executed += 1;
        let outcome = &dist[k].0;
        if !entry.accepts(outcome) {
            first_violation = Some(violation(entry, alloc::vec![outcome.clone()]));
            break;
        }
    }
    let verdict = if first_violation.is_some() {
        Verdict::Reject
    } else {
        Verdict::Accept
    };
    Ok(QuizReport {
        mode: QuizMode::Sampled,
        verdict,
        rounds_executed,
        first_violation,
        violations: Vec::new(),
        per_string_stats: stats(table, &asked),
    })
}

fn violation(entry: &TableEntry, observed: Vec<OutcomeLabel>) -> QuizViolation {
    QuizViolation {
        string: entry.string.clone(),
        observed,
        checked: entry.checked.clone(),
        allowed: entry.allowed.clone(),
    }
}

fn stats(table: &ExpectedOutcomeTable, asked: &[usize]) -> Vec<StringStats> {
    table
        .entries()
        .iter()
        .zip(asked)
        .map(|(e, &n)| StringStats {
            string: e.string.clone(),
            asked: n,
        })
        .collect()
}

/// Checks one entry: `Some(violation)` when the implementation's support,
/// projected onto the checked bits, leaves the allowed set.
pub fn check_entry(
    implementation: &QuantumModel,
    entry: &TableEntry,
    eps: f64,
) -> Result<Option<QuizViolation>> {
    let support = implementation.output_support(&entry.string, eps)?;
    if support.iter().all(|o| entry.accepts(o)) {
        Ok(None)
    } else {
        Ok(Some(violation(entry, support.iter().cloned().collect())))
    }
}

/// Assembles an exhaustive report from per-entry results in table order.
pub fn exhaustive_report(
    table: &ExpectedOutcomeTable,
    results: Vec<Option<QuizViolation>>,
) -> QuizReport {
    let violations: Vec<QuizViolation> = results.into_iter().flatten().collect();
    QuizReport {
        mode: QuizMode::Exhaustive,
        verdict: if violations.is_empty() {
            Verdict::Accept
        } else {
            Verdict::Reject
        },
        rounds_executed: table.len(),
        first_violation: violations.first().cloned(),
        violations,
        per_string_stats: stats(table, &alloc::vec![1; table.len()]),
    }
}

/// Checks every string of the table against the implementation's output
/// support and lists all violations.
pub fn quiz_exhaustive(
    implementation: &QuantumModel,
    table: &ExpectedOutcomeTable,
    eps: f64,
) -> Result<QuizReport> {
    check_alphabet(implementation, table)?;
    let results = table
        .entries()
        .iter()
        .map(|e| check_entry(implementation, e, eps))
        .collect::<Result<Vec<_>>>()?;
    Ok(exhaustive_report(table, results))
}

/// Per-round rejection probability `sum_x mu(x) P(checked bits not allowed | x)`.
pub fn detection_probability(
    implementation: &QuantumModel,
    table: &ExpectedOutcomeTable,
    weights: &[f64],
) -> Result<f64> {
    check_alphabet(implementation, table)?;
    validate_weights(weights)?;
    if weights.len() != table.len() {
        return Err(QuizError::InvalidWeights(format!(
            "{} weights for {} strings",
            weights.len(),
            table.len()
        )));
    }
    let mut total = 0.0;
    for (entry, w) in table.entries().iter().zip(weights) {
        let dist = implementation.outcome_distribution(&entry.string)?;
        let bad: f64 = dist
            .iter()
            .filter(|(o, _)| !entry.accepts(o))
            .map(|(_, p)| p)
            .sum();
        total += w * bad;
    }
    Ok(total)
}
