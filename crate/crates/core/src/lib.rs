//! Calculus of free noncommutative functions on matrix tuples.

pub mod axioms;
pub mod calculus;
pub mod error;
pub mod matcore;
pub mod ncexpr;
pub mod realimag;
pub mod report;

pub use error::{NcError, Result};
pub use report::{CheckReport, Tolerances, Verdict};
