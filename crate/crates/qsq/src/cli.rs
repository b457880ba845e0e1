//! The `qsq` command-line tool.
//!
//! Exit codes: 0 for accept or a positive answer, 2 for reject or a
//! negative answer, 1 for errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use qsq_core::adversaries::{
    build_adversary, output_map_equality, Adversary, AdversaryError,
};
use qsq_core::analysis::{
    check_equivalence, coherence_graph, kraus_block_structure, reconstruct_gauge_s1,
    reconstruct_gauge_s2_detailed, subchannel, AnalysisError,
};
use qsq_core::gates::{
    build_cl, build_s, build_sy, build_u, ket0, ket1, ket_minus, ket_plus, named_qubit_state,
    product_basis, product_state, GateError,
};
use qsq_core::instructions::{
    gen_x1, gen_x2, gen_xcl, gen_xn, gen_xu, ExpectedOutcomeTable, InstructionError,
    InstructionSet,
};
use qsq_core::quiz::{quiz_sampled, QuizConfig, QuizError};
use qsq_core::{DimsLayout, InstructionString, LinalgError, Matrix, QuantumModel};

use crate::format::{
    matrix_to_json, parse_base, read_json, read_model, read_table, to_json_string, write_json,
    AdversaryFile, BundleFile, EquivalenceFile, FormatError, GaugeFile, ModelFile, ReportFile,
};
use crate::parallel::quiz_exhaustive_parallel;

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;

/// Largest qubit count accepted by `gen` and `model`.
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Quiz(#[from] QuizError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Instruction(#[from] InstructionError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] qsq_core::ModelError),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qsq", version, about = "Quiz black-box quantum devices against target models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    S,
    Cl,
    U,
    Sy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Hadamard,
    Computational,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the instruction set and expected-outcome table of a target.
    Gen {
        #[arg(value_enum)]
        family: Family,
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built-in target model.
    Model {
        #[arg(value_enum)]
        family: Family,
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quiz a model against an expected-outcome table.
    Quiz {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        table: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        rounds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an (anti-)unitary gauge taking model B onto model A.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        antiunitary: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural analysis of models and channels.
    Analyze {
        #[command(subcommand)]
        task: AnalyzeTask,
    },
    /// Build an adversarial model from a spec file or flags.
    Adversary {
        #[arg(long, conflicts_with_all = ["kind", "base", "n"])]
        spec: Option<PathBuf>,
        #[arg(long, required_unless_present = "spec")]
        kind: Option<String>,
        #[arg(long, value_enum, required_unless_present = "spec")]
        base: Option<Family>,
        #[arg(long, required_unless_present = "spec")]
        n: Option<usize>,
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long)]
        strength: Option<f64>,
        /// Output file; for a pair, the first model.
        #[arg(long)]
        out: PathBuf,
        /// Second model of a pair.
        #[arg(long)]
        out_b: Option<PathBuf>,
    },
    /// Compare the output supports of two models on all short strings.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeTask {
    /// Channel induced on one qubit by fixing the others.
    Subchannel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        label: String,
        /// Kept qubit, 1-based.
        #[arg(long)]
        keep: usize,
        /// States of the other qubits in order, comma separated (0, 1, +, -, +y, -y).
        #[arg(long)]
        anchor: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coherence graph of the states reached by strings (`;` separated).
    Coherence {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        strings: String,
        #[arg(long, value_enum, default_value_t = BasisChoice::Hadamard)]
        basis: BasisChoice,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Block-Kraus form of a channel controlled by qubit 1.
    Blocks {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        label: String,
        #[arg(long, value_enum, default_value_t = BasisChoice::Hadamard)]
        basis: BasisChoice,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constructive gauge for a single-qubit implementation.
    ReconstructS1 {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Constructive gauge for a two-qubit implementation.
    ReconstructS2 {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// JSON to `out` with `summary` on standard output, or JSON on standard
/// output when no file is given.
fn emit<T: Serialize>(out: Option<&Path>, value: &T, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_json(path, value)?;
            println!("{summary}");
        }
        None => print!("{}", to_json_string(value)),
    }
    Ok(())
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(CliError::Usage(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn family_name(family: Family) -> &'static str {
    match family {
        Family::S => "s",
        Family::Cl => "cl",
        Family::U => "u",
        Family::Sy => "sy",
    }
}

fn target_model(family: Family, n: usize) -> Result<QuantumModel> {
    Ok(match family {
        Family::S => build_s(n)?,
        Family::Cl => build_cl(n)?,
        Family::U => build_u(n)?,
        Family::Sy => build_sy(n)?,
    })
}

/// The instruction set and table certifying a built-in target.
pub fn generate(family: Family, n: usize, eps: f64) -> Result<ExpectedOutcomeTable> {
    check_qubits(n)?;
    let phase_set = |n: usize| -> Result<InstructionSet> {
        Ok(match n {
            1 => gen_x1(),
            2 => gen_x2(),
            _ => gen_xn(n)?,
        })
    };
    let (target, set) = match family {
        Family::S | Family::Sy => (target_model(family, n)?, phase_set(n)?),
        Family::Cl => {
            if n < 2 {
                return Err(InstructionError::UnsupportedSize(n).into());
            }
            (build_cl(n)?, gen_xcl(n)?)
        }
        Family::U => {
            if n < 2 {
                return Err(InstructionError::UnsupportedSize(n).into());
            }
            return Ok(gen_xu(n)?.1);
        }
    };
    let mut set = set;
    if family == Family::Sy {
        set.set_target(&format!("Sy_{n}"));
    }
    Ok(ExpectedOutcomeTable::from_target(&target, &set, eps)?)
}

fn qubit_count(model: &QuantumModel) -> Result<usize> {
    let d = model.dim();
    if !d.is_power_of_two() || d < 2 {
        return Err(CliError::Usage(format!("dimension {d} is not a qubit register")));
    }
    Ok(d.trailing_zeros() as usize)
}

fn basis_matrix(choice: BasisChoice, n: usize) -> Matrix {
    let (zero, one) = match choice {
        BasisChoice::Hadamard => (ket_plus(), ket_minus()),
        BasisChoice::Computational => (ket0(), ket1()),
    };
    Matrix::from_columns(&product_basis(n, &zero, &one))
}

fn channel_of<'a>(model: &'a QuantumModel, label: &str) -> Result<&'a qsq_core::QuantumChannel> {
    let l = qsq_core::Label::new(label)?;
    model
        .channel(&l)
        .ok_or_else(|| CliError::Usage(format!("model has no channel {label:?}")))
}

fn analyze(task: AnalyzeTask) -> Result<i32> {
    match task {
        AnalyzeTask::Subchannel {
            model,
            label,
            keep,
            anchor,
            out,
        } => {
            let m = read_model(&model)?;
            let n = qubit_count(&m)?;
            if n < 2 {
                return Err(CliError::Usage("subchannels need two or more qubits".into()));
            }
            if keep == 0 || keep > n {
                return Err(CliError::Usage(format!("qubit {keep} outside 1..={n}")));
            }
            let symbols: Vec<&str> = anchor.split(',').map(str::trim).collect();
            if symbols.len() != n - 1 {
                return Err(CliError::Usage(format!(
                    "anchor needs {} qubit states, got {}",
                    n - 1,
                    symbols.len()
                )));
            }
            let qubits = symbols
                .iter()
                .map(|s| {
                    named_qubit_state(s)
                        .ok_or_else(|| CliError::Usage(format!("unknown qubit state {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let anchor_state = Matrix::projector(&product_state(&qubits));
            // Move the kept qubit to the front, keeping the others in order.
            let layout = DimsLayout::new(vec![2, 1 << (n - 1)])?;
            let mut order: Vec<usize> = vec![keep];
            order.extend((1..=n).filter(|&q| q != keep));
            let perm = permutation_unitary(n, &order);
            let ch = channel_of(&m, &label)?.conjugated_by(&perm)?;
            let sub = subchannel(&ch, &layout, 0, &anchor_state)?;
            let kraus = sub.to_channel()?;
            let value = json!({
                "label": label,
                "kept_qubit": keep,
                "anchor": symbols,
                "superoperator": matrix_to_json(&sub.superoperator()?),
                "kraus": kraus.kraus().iter().map(matrix_to_json).collect::<Vec<_>>(),
            });
            emit(
                out.as_deref(),
                &value,
                &format!("subchannel of {label} on qubit {keep}: {} Kraus operators", kraus.kraus_count()),
            )?;
            Ok(EXIT_POSITIVE)
        }
        AnalyzeTask::Coherence {
            model,
            strings,
            basis,
            tol,
            out,
        } => {
            let m = read_model(&model)?;
            let n = qubit_count(&m)?;
            let states = strings
                .split(';')
                .map(|s| Ok(m.run_sequence(&InstructionString::parse(s.trim())?)?))
                .collect::<Result<Vec<_>>>()?;
            let graph = coherence_graph(&basis_matrix(basis, n), &states, tol)?;
            let connected = graph.is_connected();
            let value = json!({
                "vertices": graph.len(),
                "edges": graph.edges(),
                "connected": connected,
            });
            emit(
                out.as_deref(),
                &value,
                if connected { "connected" } else { "disconnected" },
            )?;
            Ok(if connected { EXIT_POSITIVE } else { EXIT_NEGATIVE })
        }
        AnalyzeTask::Blocks {
            model,
            label,
            basis,
            tol,
            out,
        } => {
            let m = read_model(&model)?;
            let n = qubit_count(&m)?;
            if n < 2 {
                return Err(CliError::Usage("block analysis needs two or more qubits".into()));
            }
            let layout = DimsLayout::new(vec![2, 1 << (n - 1)])?;
            let ch = channel_of(&m, &label)?;
            match kraus_block_structure(ch, &layout, &basis_matrix(basis, 1), tol) {
                Ok(blocks) => {
                    let value = json!({
                        "label": label,
                        "blocks": blocks
                            .blocks
                            .iter()
                            .map(|row| row.iter().map(matrix_to_json).collect::<Vec<_>>())
                            .collect::<Vec<_>>(),
                    });
                    emit(out.as_deref(), &value, &format!("{label} has block form"))?;
                    Ok(EXIT_POSITIVE)
                }
                Err(AnalysisError::Membership {
                    basis_index,
                    anchor_index,
                    deviation,
                }) => {
                    let value = json!({
                        "label": label,
                        "membership_failure": {
                            "basis_index": basis_index,
                            "anchor_index": anchor_index,
                            "deviation": deviation,
                        },
                    });
                    emit(
                        out.as_deref(),
                        &value,
                        &format!("membership fails at basis vector {basis_index}, anchor {anchor_index}"),
                    )?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(AnalysisError::OffBlock { residual }) => {
                    let value = json!({ "label": label, "off_block_residual": residual });
                    emit(out.as_deref(), &value, &format!("off-block residual {residual:e}"))?;
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        AnalyzeTask::ReconstructS1 { model, out } => {
            let m = read_model(&model)?;
            reconstruction(out.as_deref(), reconstruct_gauge_s1(&m).map(|g| (g, None)))
        }
        AnalyzeTask::ReconstructS2 { model, out } => {
            let m = read_model(&model)?;
            reconstruction(
                out.as_deref(),
                reconstruct_gauge_s2_detailed(&m).map(|(g, p)| (g, Some(p))),
            )
        }
    }
}

fn reconstruction(
    out: Option<&Path>,
    result: std::result::Result<
        (qsq_core::analysis::GaugeResult, Option<qsq_core::analysis::S2Parameters>),
        AnalysisError,
    >,
) -> Result<i32> {
    match result {
        Ok((g, params)) => {
            let mut value = serde_json::to_value(GaugeFile::from(&g)).expect("serializable");
            if let Some(p) = params {
                value["parameters"] = json!({
                    "r": p.r, "s": p.s, "t": p.t, "alpha": p.alpha, "beta": p.beta,
                });
            }
            emit(out, &value, &format!("gauge found, residual {:e}", g.residual))?;
            Ok(EXIT_POSITIVE)
        }
        Err(e @ (AnalysisError::QuizFailure { .. } | AnalysisError::StepFailed { .. })) => {
            let step = match &e {
                AnalysisError::QuizFailure { step, .. } | AnalysisError::StepFailed { step, .. } => {
                    step.to_string()
                }
                _ => unreachable!(),
            };
            let value = json!({ "failed_step": step, "detail": e.to_string() });
            emit(out, &value, &format!("reconstruction failed: {e}"))?;
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => Err(e.into()),
    }
}

/// Unitary moving qubit `order[t]` (1-based) to position `t`.
fn permutation_unitary(n: usize, order: &[usize]) -> Matrix {
    let d = 1usize << n;
    let mut p = Matrix::zeros(d, d);
    for x in 0..d {
        let mut y = 0;
        for (t, &q) in order.iter().enumerate() {
            let bit = (x >> (n - q)) & 1;
            y |= bit << (n - 1 - t);
        }
        p[(y, x)] = qsq_core::c64(1.0, 0.0);
    }
    p
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen { family, n, eps, out } => {
            let table = generate(family, n, eps)?;
            emit(
                out.as_deref(),
                &BundleFile::from_table(&table),
                &format!("{}: {} strings", table.target(), table.len()),
            )?;
            Ok(EXIT_POSITIVE)
        }
        Command::Model { family, n, out } => {
            check_qubits(n)?;
            let m = target_model(family, n)?;
            emit(
                out.as_deref(),
                &ModelFile::from_model(&m),
                &format!("{}{n}: dimension {}", family_name(family), m.dim()),
            )?;
            Ok(EXIT_POSITIVE)
        }
        Command::Quiz {
            model,
            table,
            mode,
            rounds,
            seed,
            eps,
            out,
        } => {
            let m = read_model(&model)?;
            let t = read_table(&table)?;
            let (report, seed) = match mode {
                Mode::Exhaustive => (quiz_exhaustive_parallel(&m, &t, eps)?, None),
                Mode::Sampled => {
                    let cfg = QuizConfig::uniform(rounds, t.len(), seed)?;
                    (quiz_sampled(&m, &t, &cfg)?, Some(seed))
                }
            };
            let file = ReportFile::from_report(&report, seed, eps);
            let mut summary = format!("{} after {} checks", file.verdict, file.rounds_executed);
            if let Some(v) = &file.first_violation {
                summary.push_str(&format!("; first violation at {:?}", v.string));
            }
            emit(out.as_deref(), &file, &summary)?;
            Ok(if report.accepted() {
                EXIT_POSITIVE
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Equiv {
            a,
            b,
            antiunitary,
            tol,
            out,
        } => {
            let ma = read_model(&a)?;
            let mb = read_model(&b)?;
            let result = check_equivalence(&ma, &mb, antiunitary, tol)?;
            let file = EquivalenceFile {
                equivalent: result.is_some(),
                tol,
                gauge: result.as_ref().map(GaugeFile::from),
            };
            let summary = match &result {
                Some(g) => format!(
                    "equivalent ({}), residual {:e}",
                    if g.antiunitary { "anti-unitary" } else { "unitary" },
                    g.residual
                ),
                None => "not equivalent".to_string(),
            };
            emit(out.as_deref(), &file, &summary)?;
            Ok(if result.is_some() {
                EXIT_POSITIVE
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Analyze { task } => analyze(task),
        Command::Adversary {
            spec,
            kind,
            base,
            n,
            angle,
            strength,
            out,
            out_b,
        } => {
            let file = match spec {
                Some(path) => read_json::<AdversaryFile>(&path)?,
                None => AdversaryFile {
                    kind: kind.expect("required by clap"),
                    base: family_name(base.expect("required by clap")).to_string(),
                    n: n.expect("required by clap"),
                    angle,
                    strength,
                },
            };
            check_qubits(file.n)?;
            parse_base(&file.base, file.n)?;
            match build_adversary(&file.to_spec()?)? {
                Adversary::Single(m) => {
                    write_json(&out, &ModelFile::from_model(&m))?;
                    println!("{} on {}{}: {}", file.kind, file.base, file.n, out.display());
                }
                Adversary::Pair(a, b) => {
                    let out_b = out_b.ok_or_else(|| {
                        CliError::Usage(format!("{} produces two models; pass --out-b", file.kind))
                    })?;
                    write_json(&out, &ModelFile::from_model(&a))?;
                    write_json(&out_b, &ModelFile::from_model(&b))?;
                    println!(
                        "{} on {}{}: {} and {}",
                        file.kind,
                        file.base,
                        file.n,
                        out.display(),
                        out_b.display()
                    );
                }
            }
            Ok(EXIT_POSITIVE)
        }
        Command::Compare {
            a,
            b,
            max_len,
            eps,
            out,
        } => {
            let ma = read_model(&a)?;
            let mb = read_model(&b)?;
            let cmp = output_map_equality(&ma, &mb, max_len, eps)?;
            let value = json!({
                "equal": cmp.equal,
                "max_len": max_len,
                "strings_checked": cmp.strings_checked,
                "first_divergence": cmp.first_divergence.as_ref().map(|d| json!({
                    "string": d.string.to_string(),
                    "support_a": d.support_a.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                    "support_b": d.support_b.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
                })),
            });
            let summary = match &cmp.first_divergence {
                None => format!("equal on {} strings", cmp.strings_checked),
                Some(d) => format!("differ at {:?}", d.string.to_string()),
            };
            emit(out.as_deref(), &value, &summary)?;
            Ok(if cmp.equal { EXIT_POSITIVE } else { EXIT_NEGATIVE })
        }
    }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn main_exit() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_POSITIVE };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
