//! Command-line pipeline around the `densfit` library.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod commands;
pub mod config;

pub use config::{ExperimentConfig, Metric};
