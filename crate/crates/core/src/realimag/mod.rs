//! Real and imaginary parts of nc functions and the way back.
//!
//! `decompose` turns `f` on complex tuples into the pair `u = ½(f + f*)`,
//! `v = (1/2i)(f − f*)` evaluated at `A + iB`; `reconstruct` glues a pair of
//! real nc functions into `f(A + iB) = u(A,B) + i·v(A,B)`. Whether the glued
//! map respects similarities is exactly what the Cauchy–Riemann checks here
//! and the axiom harness probe.

mod cr;
mod diag;
mod lemmas;
mod verdict;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{NcError, Result};
use crate::matcore::{CMat, MatTuple, HERM_TOL, I};
use crate::ncexpr::{NcExpr, NcFunction, NcMap, Space, VarKind};

pub use cr::{cr_check, cr_samples, du_dv, du_dv_consistency, CrInput, CrReport, DerivRoute};
pub use diag::{diag_blocks_check, diag_conditions_demo, diag_respect_check, DiagConditions};
pub use lemmas::{commutator_identity_check, homogeneity_check, HOMOGENEITY_SAMPLES};
pub use verdict::{nc_function_verdict, NcVerdict};

/// One of the two real parts of a complex nc function.
#[derive(Debug, Clone)]
pub struct Part {
    f: Arc<NcFunction>,
    imaginary: bool,
}

impl NcMap for Part {
    fn arity(&self) -> usize {
        2 * self.f.vars.d()
    }

    fn space(&self) -> Space {
        Space::Hermitian
    }

    fn eval(&self, x: &MatTuple) -> Result<CMat> {
        if x.arity() != self.arity() {
            return Err(NcError::KindMismatch(format!(
                "{} takes {} Hermitian matrices",
                self.describe(),
                self.arity()
            )));
        }
        if !x.is_hermitian(HERM_TOL) {
            return Err(NcError::DomainViolation("point is not Hermitian".into()));
        }
        let (a, b) = x.split_pair()?;
        let fx = self.f.eval(&MatTuple::complexify(&a, &b)?)?;
        Ok(if self.imaginary {
            fx.imaginary_part()
        } else {
            fx.hermitian_part()
        })
    }

    fn describe(&self) -> String {
        let tag = if self.imaginary { "Im" } else { "Re" };
        format!("{tag}({})", self.f.text())
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub f: Arc<NcFunction>,
    pub u: Arc<Part>,
    pub v: Arc<Part>,
}

/// Splits `f` over complex variables into its real and imaginary parts.
pub fn decompose(f: &NcFunction) -> Result<Decomposition> {
    if !matches!(f.vars, VarKind::ComplexVars(_)) || f.space != Space::Complex {
        return Err(NcError::KindMismatch(
            "decomposition needs a function of complex variables on all square tuples".into(),
        ));
    }
    let f = Arc::new(f.clone());
    Ok(Decomposition {
        u: Arc::new(Part {
            f: f.clone(),
            imaginary: false,
        }),
        v: Arc::new(Part {
            f: f.clone(),
            imaginary: true,
        }),
        f,
    })
}

fn substitute(e: &NcExpr, d: usize) -> NcExpr {
    let sub = |x: &NcExpr| Box::new(substitute(x, d));
    match e {
        NcExpr::Var(k) => NcExpr::add(NcExpr::var(*k), NcExpr::scalar_mul(I, NcExpr::var(d + k))),
        NcExpr::Const(c) => NcExpr::Const(*c),
        NcExpr::Add(l, r) => NcExpr::Add(sub(l), sub(r)),
        NcExpr::Sub(l, r) => NcExpr::Sub(sub(l), sub(r)),
        NcExpr::Mul(l, r) => NcExpr::Mul(sub(l), sub(r)),
        NcExpr::ScalarMul(c, x) => NcExpr::ScalarMul(*c, sub(x)),
        NcExpr::Adjoint(x) => NcExpr::Adjoint(sub(x)),
        NcExpr::SqrtPos(x) => NcExpr::SqrtPos(sub(x)),
    }
}

/// `u = ½(g + g*)` and `v = −(i/2)(g − g*)` with `g = f(A + iB)`, as
/// expressions in the real pair variables. Domain guards of `f` are not
/// carried over.
pub fn symbolic_parts(f: &NcFunction) -> Result<(NcFunction, NcFunction)> {
    decompose(f)?;
    let d = f.vars.d();
    let g = substitute(&f.expr, d);
    let gs = NcExpr::adjoint(g.clone());
    let u = NcExpr::scalar_mul(Complex64::new(0.5, 0.0), NcExpr::add(g.clone(), gs.clone()));
    let v = NcExpr::scalar_mul(Complex64::new(0.0, -0.5), NcExpr::sub(g, gs));
    let pairs = VarKind::RealPairs(d);
    Ok((NcFunction::new(u, pairs)?, NcFunction::new(v, pairs)?))
}

/// `f(A + iB) = u(A,B) + i·v(A,B)` for a pair of real nc functions.
#[derive(Clone)]
pub struct Reconstructed {
    pub u: Arc<dyn NcMap>,
    pub v: Arc<dyn NcMap>,
}

pub fn reconstruct(u: Arc<dyn NcMap>, v: Arc<dyn NcMap>) -> Result<Reconstructed> {
    if u.arity() != v.arity() || !u.arity().is_multiple_of(2) || u.arity() == 0 {
        return Err(NcError::KindMismatch(format!(
            "u and v must take the same even number of matrices, got {} and {}",
            u.arity(),
            v.arity()
        )));
    }
    Ok(Reconstructed { u, v })
}

impl Reconstructed {
    pub fn d(&self) -> usize {
        self.u.arity() / 2
    }

    /// The Hermitian pair `(A, B)` of a complex point, concatenated.
    pub fn pair_point(x: &MatTuple) -> Result<MatTuple> {
        let (a, b) = x.real_imag_parts();
        a.concat(&b)
    }
}

impl NcMap for Reconstructed {
    fn arity(&self) -> usize {
        self.d()
    }

    fn space(&self) -> Space {
        Space::Complex
    }

    fn eval(&self, x: &MatTuple) -> Result<CMat> {
        if x.arity() != self.d() {
            return Err(NcError::KindMismatch(format!(
                "reconstruction takes {} matrices",
                self.d()
            )));
        }
        let p = Self::pair_point(x)?;
        self.u.eval(&p)?.checked_add(&self.v.eval(&p)?.scale(I))
    }

    fn describe(&self) -> String {
        format!("{} + i({})", self.u.describe(), self.v.describe())
    }
}
