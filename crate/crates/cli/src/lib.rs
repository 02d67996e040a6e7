//! Command-line front end for `nomacov`: scenario files, sweeps and the
//! analytic-versus-simulation self-test.

pub mod config;
pub mod error;
pub mod selftest;
pub mod sweep;

pub use error::{CliError, Result};
