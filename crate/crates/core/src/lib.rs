#![no_std]
extern crate alloc;

pub mod binomial;
pub mod chebyshev;
pub mod distribution;
pub mod extremal;
pub mod error;
pub mod kwise;
pub mod lp;
pub mod perturbation;
pub mod poly;
pub mod rational;
pub mod suites;
pub mod real;
pub mod relaxed;

pub use error::{Error, Result};
