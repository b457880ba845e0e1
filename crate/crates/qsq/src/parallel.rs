//! Parallel exhaustive quizzing.

use rayon::prelude::*;

use qsq_core::instructions::ExpectedOutcomeTable;
use qsq_core::quiz::{check_alphabet, check_entry, exhaustive_report, QuizError, QuizReport};
use qsq_core::QuantumModel;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QSQ_THREADS";

/// Worker count: `QSQ_THREADS` if set to a positive integer, otherwise the
/// available parallelism.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map_or(available, |n| n.min(available))
}

/// Exhaustive quiz with entries checked in parallel; the report is
/// identical to the sequential one.
pub fn quiz_exhaustive_parallel(
    implementation: &QuantumModel,
    table: &ExpectedOutcomeTable,
    eps: f64,
) -> Result<QuizReport, QuizError> {
    check_alphabet(implementation, table)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .expect("thread pool");
    let results = pool.install(|| {
        table
            .entries()
            .par_iter()
            .map(|e| check_entry(implementation, e, eps))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(exhaustive_report(table, results))
}
