//! Pull-forward planning under binomial intake ambiguity.

pub mod error;
pub mod expectation;
pub mod experiments;
pub mod intake;
pub mod master;
pub mod nonparametric;
pub mod parametric;
pub mod planning;

pub use error::{Error, Result};
