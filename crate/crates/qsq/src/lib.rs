//! File formats, parallel quizzing and the command-line front end for
//! `qsq-core`.

pub mod cli;
pub mod format;
pub mod parallel;
