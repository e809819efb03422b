//! Command-line driver: simulation, pair matching, evaluation, merging and
//! benchmarking, plus the file formats they read and write.

// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod svg;

pub use config::RunConfig;
pub use error::CliError;
