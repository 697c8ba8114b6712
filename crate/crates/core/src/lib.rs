//! Composite pulse synthesis and first-order robustness analysis for SU(2) gates.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod error_model;
pub mod quadrature;
pub mod sequences;
pub mod su2;

pub use error::{Error, Result};
