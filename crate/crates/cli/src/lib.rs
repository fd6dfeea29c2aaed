//! Experiment harness for `kic-core`: synthetic sinc studies, real-data
//! benchmarks and one-shot scoring, with CSV, JSON and SVG output.

// `!(x > 0)` style checks are intended: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod output;
pub mod plot;
pub mod stats;

pub use experiments::{exit_code, with_jobs, RunConfig, TrialRecord, UsageError};
