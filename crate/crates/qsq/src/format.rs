//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Channels keep their file order, which is also the model's alphabet order.

use std::path::Path;

use indexmap::IndexMap;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use thiserror::Error;

use qsq_core::adversaries::{AdversaryKind, AdversarySpec, BaseModel};
use qsq_core::analysis::GaugeResult;
use qsq_core::instructions::{ExpectedOutcomeTable, TableEntry};
use qsq_core::model::validate_model;
use qsq_core::quiz::{QuizMode, QuizReport, QuizViolation, Verdict};
use qsq_core::{
    InstructionString, Label, Matrix, ModelError, OutcomeLabel, Povm, QuantumChannel,
    QuantumModel, C64,
};

/// Tolerance used when validating models read from files.
pub const VALIDATION_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("invalid file contents: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, FormatError>;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &Matrix) -> JsonMatrix {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &JsonMatrix) -> Result<Matrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(FormatError::Invalid("matrix rows are empty or ragged".into()));
    }
    let data = rows
        .iter()
        .flat_map(|r| r.iter().map(|[re, im]| C64::new(*re, *im)))
        .collect();
    Matrix::from_vec(rows.len(), cols, data)
        .map_err(|e| FormatError::Invalid(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectFile {
    pub label: String,
    pub effect: JsonMatrix,
}

/// A quantum model: initial state, Kraus operators per label, POVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub dim: usize,
    pub initial_state: JsonMatrix,
    pub channels: IndexMap<String, Vec<JsonMatrix>>,
    pub povm: Vec<EffectFile>,
}

impl ModelFile {
    pub fn from_model(model: &QuantumModel) -> Self {
        Self {
            dim: model.dim(),
            initial_state: matrix_to_json(model.initial_state()),
            channels: model
                .channels()
                .iter()
                .map(|(l, c)| (l.as_str().to_string(), c.kraus().iter().map(matrix_to_json).collect()))
                .collect(),
            povm: model
                .povm()
                .outcomes()
                .iter()
                .map(|(l, e)| EffectFile {
                    label: l.as_str().to_string(),
                    effect: matrix_to_json(e),
                })
                .collect(),
        }
    }

    /// Builds the model and checks it is a valid quantum model.
    pub fn to_model(&self) -> Result<QuantumModel> {
        let rho = matrix_from_json(&self.initial_state)?;
        if rho.rows() != self.dim {
            return Err(FormatError::Invalid(format!(
                "initial state has dimension {} but dim is {}",
                rho.rows(),
                self.dim
            )));
        }
        let channels = self
            .channels
            .iter()
            .map(|(l, ks)| {
                let kraus = ks.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
                Ok((Label::new(l)?, QuantumChannel::new(kraus)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let povm = Povm::new(
            self.povm
                .iter()
                .map(|e| Ok((OutcomeLabel::new(&e.label)?, matrix_from_json(&e.effect)?)))
                .collect::<Result<Vec<_>>>()?,
        )?;
        let model = QuantumModel::new(rho, channels, povm)?;
        let violations = validate_model(&model, VALIDATION_TOL);
        if let Some(v) = violations.first() {
            return Err(FormatError::Invalid(v.to_string()));
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryFile {
    pub checked_bits: Vec<usize>,
    pub allowed_values: Vec<String>,
}

/// An instruction set with its expected-outcome table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub target: String,
    pub strings: Vec<String>,
    pub table: IndexMap<String, EntryFile>,
}

impl BundleFile {
    pub fn from_table(table: &ExpectedOutcomeTable) -> Self {
        Self {
            target: table.target().to_string(),
            strings: table.entries().iter().map(|e| e.string.to_string()).collect(),
            table: table
                .entries()
                .iter()
                .map(|e| {
                    (
                        e.string.to_string(),
                        EntryFile {
                            checked_bits: e.checked.clone(),
                            allowed_values: e.allowed.iter().cloned().collect(),
                        },
                    )
                })
                .collect(),
        }
    }

    /// Table in the order of `strings`; every string needs an entry.
    pub fn to_table(&self) -> Result<ExpectedOutcomeTable> {
        let mut entries = Vec::with_capacity(self.strings.len());
        for s in &self.strings {
            let e = self
                .table
                .get(s)
                .ok_or_else(|| FormatError::Invalid(format!("no table entry for {s:?}")))?;
            if e.allowed_values.is_empty() {
                return Err(FormatError::Invalid(format!("no allowed values for {s:?}")));
            }
            entries.push(TableEntry {
                string: InstructionString::parse(s)?,
                checked: e.checked_bits.clone(),
                allowed: e.allowed_values.iter().cloned().collect(),
            });
        }
        if self.table.len() != self.strings.len() {
            return Err(FormatError::Invalid(
                "table has entries for strings not in the set".into(),
            ));
        }
        Ok(ExpectedOutcomeTable::new(&self.target, entries))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationFile {
    pub string: String,
    pub observed: Vec<String>,
    pub checked_bits: Vec<usize>,
    pub allowed_values: Vec<String>,
}

impl From<&QuizViolation> for ViolationFile {
    fn from(v: &QuizViolation) -> Self {
        Self {
            string: v.string.to_string(),
            observed: v.observed.iter().map(|o| o.as_str().to_string()).collect(),
            checked_bits: v.checked.clone(),
            allowed_values: v.allowed.iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatFile {
    pub string: String,
    pub asked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub mode: String,
    pub verdict: String,
    pub rounds_executed: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub eps: f64,
    pub first_violation: Option<ViolationFile>,
    pub violations: Vec<ViolationFile>,
    pub per_string_stats: Vec<StatFile>,
}

impl ReportFile {
    pub fn from_report(report: &QuizReport, seed: Option<u64>, eps: f64) -> Self {
        Self {
            mode: match report.mode {
                QuizMode::Sampled => "sampled",
                QuizMode::Exhaustive => "exhaustive",
            }
            .into(),
            verdict: match report.verdict {
                Verdict::Accept => "accept",
                Verdict::Reject => "reject",
            }
            .into(),
            rounds_executed: report.rounds_executed,
            seed,
            eps,
            first_violation: report.first_violation.as_ref().map(ViolationFile::from),
            violations: report.violations.iter().map(ViolationFile::from).collect(),
            per_string_stats: report
                .per_string_stats
                .iter()
                .map(|s| StatFile {
                    string: s.string.to_string(),
                    asked: s.asked,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeFile {
    pub antiunitary: bool,
    pub matrix: JsonMatrix,
    pub residual: f64,
}

impl From<&GaugeResult> for GaugeFile {
    fn from(g: &GaugeResult) -> Self {
        Self {
            antiunitary: g.antiunitary,
            matrix: matrix_to_json(&g.matrix),
            residual: g.residual,
        }
    }
}

impl GaugeFile {
    pub fn to_gauge(&self) -> Result<GaugeResult> {
        Ok(GaugeResult {
            antiunitary: self.antiunitary,
            matrix: matrix_from_json(&self.matrix)?,
            residual: self.residual,
        })
    }
}

/// Outcome of an equivalence search; `gauge` is absent when none was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceFile {
    pub equivalent: bool,
    pub tol: f64,
    pub gauge: Option<GaugeFile>,
}

/// Adversary description; `angle` and `strength` apply to overrotation and
/// depolarizing adversaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryFile {
    pub kind: String,
    pub base: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strength: Option<f64>,
}

/// Parses a built-in model family: `s`, `cl`, `u` or `sy`.
pub fn parse_base(name: &str, n: usize) -> Result<BaseModel> {
    Ok(match name {
        "s" => BaseModel::S(n),
        "cl" => BaseModel::Cl(n),
        "u" => BaseModel::U(n),
        "sy" => BaseModel::Sy(n),
        other => return Err(FormatError::Invalid(format!("unknown model family {other:?}"))),
    })
}

impl AdversaryFile {
    pub fn to_spec(&self) -> Result<AdversarySpec> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| FormatError::Invalid(format!("{} needs {what}", self.kind)))
        };
        let kind = match self.kind.as_str() {
            "t_substitution" => AdversaryKind::TSubstitution,
            "overrotation" => AdversaryKind::Overrotation {
                angle: need(self.angle, "an angle")?,
            },
            "depolarizing" => AdversaryKind::Depolarizing {
                strength: need(self.strength, "a strength")?,
            },
            "decoherent_conditional" => AdversaryKind::DecoherentConditional,
            "swapped_labels" => AdversaryKind::SwappedLabels,
            "wrong_initial_state" => AdversaryKind::WrongInitialState,
            "tz_ambiguity_pair" => AdversaryKind::TzAmbiguityPair,
            other => return Err(FormatError::Invalid(format!("unknown adversary {other:?}"))),
        };
        Ok(AdversarySpec {
            kind,
            base: parse_base(&self.base, self.n)?,
        })
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_model(path: &Path) -> Result<QuantumModel> {
    read_json::<ModelFile>(path)?.to_model()
}

pub fn read_table(path: &Path) -> Result<ExpectedOutcomeTable> {
    read_json::<BundleFile>(path)?.to_table()
}
