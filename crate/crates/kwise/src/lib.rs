//! Command-line front end for `kwise-core`: certificates as JSON, scans and
//! dual polynomials as CSV, property suites, and sampling.

pub mod cli;
pub mod commands;
pub mod error;
pub mod parallel;
pub mod report;

pub use commands::main_with_args;
pub use error::CliError;
