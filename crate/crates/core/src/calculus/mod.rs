//! Derivatives of nc functions.
//!
//! Two routes are available. The algebraic route reads the derivative off
//! the upper-right block of `f` at `[[X, rZ], [0, Y]]` and needs the tree of
//! an nc polynomial. The finite-difference route treats the function as a
//! black box and works for anything that evaluates, including real nc
//! functions on Hermitian tuples.

mod checks;
mod delta;
mod fd;

use serde::Serialize;
use serde_json::{json, Value};

use crate::matcore::interchange::mat_to_value;
use crate::matcore::CMat;

pub use checks::{block_derivative_check, f_diff_check, FdiffOptions};
pub use delta::{delta_op, g_derivative_algebraic, DeltaValue};
pub use fd::{g_derivative_fd, StepSchedule};

/// How a derivative value was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivMethod {
    /// Block evaluation at `r`, cross-checked at `cross_r`.
    AlgebraicBlock { r: f64, cross_r: f64 },
    /// Finest central difference, no extrapolation.
    CentralDiff { steps: Vec<f64> },
    /// Central differences with one Richardson step; `steps` are the ones used.
    Richardson { steps: Vec<f64>, order: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeReport {
    pub value: CMat,
    pub method: DerivMethod,
    pub cross_check_residual: f64,
    pub consistent: bool,
}

impl DerivativeReport {
    pub fn to_value(&self) -> Value {
        json!({
            "method": self.method,
            "value": mat_to_value(&self.value),
            "cross_check_residual": self.cross_check_residual,
            "consistent": self.consistent,
        })
    }
}
