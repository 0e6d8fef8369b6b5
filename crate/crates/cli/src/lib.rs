//! Command-line front end: project configuration, file formats, reports and
//! the synthetic accelerogram generator.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod app;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod synth;

pub use error::{CliError, Result};
