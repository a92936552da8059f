use std::fmt;

use serde::Serialize;

use super::ast::{serialize, NcExpr, VarKind};
use super::guard::{DomainGuard, DomainVerdict};
use super::parser::parse;
use crate::error::{NcError, Result};
use crate::matcore::{herm_eig, sqrt_psd, CMat, MatTuple, HERM_TOL};

/// Relative Hermitian slack for the argument of `sqrtm`.
const SQRT_ARG_HERM_TOL: f64 = 1e-10;

/// Which points a function accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    /// Arbitrary square complex tuples.
    Complex,
    /// Hermitian tuples only.
    Hermitian,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Complex => "cnc",
            Space::Hermitian => "hnc",
        })
    }
}

/// Anything that can be evaluated level by level on matrix tuples.
pub trait NcMap: Send + Sync {
    fn arity(&self) -> usize;
    fn space(&self) -> Space;
    fn eval(&self, x: &MatTuple) -> Result<CMat>;
    fn describe(&self) -> String;

    /// The underlying expression, when there is one; used by routes that
    /// need the tree (the algebraic derivative refuses otherwise).
    fn as_nc_function(&self) -> Option<&NcFunction> {
        None
    }
}

/// Evaluates `expr` bottom-up at `x` without any domain bookkeeping.
pub fn eval_expr(expr: &NcExpr, x: &MatTuple) -> Result<CMat> {
    let n = x.dim();
    match expr {
        NcExpr::Var(i) => x.mats().get(*i).cloned().ok_or_else(|| NcError::ArityMismatch {
            expected: i + 1,
            got: x.arity(),
        }),
        NcExpr::Const(c) => Ok(CMat::scalar(n, *c)),
        NcExpr::Add(l, r) => eval_expr(l, x)?.checked_add(&eval_expr(r, x)?),
        NcExpr::Sub(l, r) => eval_expr(l, x)?.checked_sub(&eval_expr(r, x)?),
        NcExpr::Mul(l, r) => eval_expr(l, x)?.checked_mul(&eval_expr(r, x)?),
        NcExpr::ScalarMul(c, e) => Ok(eval_expr(e, x)?.scale(*c)),
        NcExpr::Adjoint(e) => Ok(eval_expr(e, x)?.adjoint()),
        NcExpr::SqrtPos(e) => {
            let m = eval_expr(e, x)?;
            if !m.is_hermitian(SQRT_ARG_HERM_TOL) {
                return Err(NcError::NotHermitian {
                    deviation: m.hermitian_deviation(),
                });
            }
            sqrt_psd(&m.hermitian_part())
        }
    }
}

/// An expression together with its variable kind, domain guard and space.
#[derive(Debug, Clone, PartialEq)]
pub struct NcFunction {
    pub expr: NcExpr,
    pub vars: VarKind,
    pub guard: DomainGuard,
    pub space: Space,
}

impl NcFunction {
    /// Real-pair functions live on Hermitian points; complex-variable ones on
    /// all square tuples.
    pub fn new(expr: NcExpr, vars: VarKind) -> Result<Self> {
        if let Some(k) = expr.max_var() {
            if k >= vars.arity() {
                return Err(NcError::Arity {
                    name: vars.var_name(k),
                    arity: vars.d(),
                });
            }
        }
        let space = if vars.is_real() {
            Space::Hermitian
        } else {
            Space::Complex
        };
        Ok(NcFunction {
            expr,
            vars,
            guard: DomainGuard::All,
            space,
        })
    }

    pub fn parse(text: &str, vars: VarKind) -> Result<Self> {
        Self::new(parse(text, vars)?, vars)
    }

    pub fn with_guard(mut self, guard: DomainGuard) -> Self {
        self.guard = guard;
        self
    }

    /// The same expression viewed as a function on Hermitian tuples.
    pub fn restricted_to_hermitian(mut self) -> Self {
        self.space = Space::Hermitian;
        self
    }

    pub fn is_polynomial(&self) -> bool {
        self.expr.is_polynomial()
    }

    pub fn text(&self) -> String {
        serialize(&self.expr, self.vars)
    }

    fn check_kind(&self, x: &MatTuple) -> Result<()> {
        if x.arity() != self.vars.arity() {
            return Err(NcError::KindMismatch(format!(
                "`{}` takes {} matrices, the point has {}",
                self.text(),
                self.vars.arity(),
                x.arity()
            )));
        }
        if !x.is_square() {
            return Err(NcError::KindMismatch("points must be square".into()));
        }
        Ok(())
    }

    /// Guard, Hermitian-space and `sqrtm` argument checks at `x`.
    pub fn check_domain(&self, x: &MatTuple) -> DomainVerdict {
        let mut v = self.guard.check(x, self.vars);
        if let Err(e) = self.check_kind(x) {
            return DomainVerdict {
                ok: false,
                messages: vec![e.to_string()],
                min_eigenvalue: None,
            };
        }
        let fail = |v: &mut DomainVerdict, msg: String| {
            v.ok = false;
            v.messages.push(msg);
        };
        if self.space == Space::Hermitian && !x.is_hermitian(HERM_TOL) {
            fail(
                &mut v,
                format!("point is not Hermitian (deviation {:e})", x.hermitian_deviation()),
            );
        }
        let mut args = Vec::new();
        self.expr.visit_sqrt_args(&mut args);
        for arg in args {
            let name = serialize(arg, self.vars);
            let m = match eval_expr(arg, x) {
                Ok(m) => m,
                Err(e) => {
                    fail(&mut v, format!("sqrtm argument `{name}`: {e}"));
                    continue;
                }
            };
            if !m.is_hermitian(SQRT_ARG_HERM_TOL) {
                fail(&mut v, format!("sqrtm argument `{name}` is not Hermitian"));
                continue;
            }
            match herm_eig(&m.hermitian_part()) {
                Ok(eig) => {
                    let lam = eig.min();
                    v.min_eigenvalue = Some(v.min_eigenvalue.map_or(lam, |m| m.min(lam)));
                    let scale = eig.max().abs().max(lam.abs());
                    if lam < -crate::matcore::spectral::PSD_CLAMP * scale {
                        fail(&mut v, format!("sqrtm argument `{name}` has eigenvalue {lam:e}"));
                    }
                }
                Err(e) => fail(&mut v, format!("sqrtm argument `{name}`: {e}")),
            }
        }
        v
    }

    /// Evaluates at `x` after checking kind, space and guard.
    pub fn eval(&self, x: &MatTuple) -> Result<CMat> {
        self.check_kind(x)?;
        if self.space == Space::Hermitian && !x.is_hermitian(HERM_TOL) {
            return Err(NcError::DomainViolation(format!(
                "point is not Hermitian (deviation {:e})",
                x.hermitian_deviation()
            )));
        }
        self.guard.check(x, self.vars).into_result()?;
        eval_expr(&self.expr, x)
    }
}

impl NcMap for NcFunction {
    fn arity(&self) -> usize {
        self.vars.arity()
    }

    fn space(&self) -> Space {
        self.space
    }

    fn eval(&self, x: &MatTuple) -> Result<CMat> {
        NcFunction::eval(self, x)
    }

    fn describe(&self) -> String {
        self.text()
    }

    fn as_nc_function(&self) -> Option<&NcFunction> {
        Some(self)
    }
}

type EvalFn = dyn Fn(&MatTuple) -> Result<CMat> + Send + Sync;

/// A map given by a closure, for functions that are not expressions.
pub struct ClosureMap {
    arity: usize,
    space: Space,
    name: String,
    f: Box<EvalFn>,
}

impl ClosureMap {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        space: Space,
        f: impl Fn(&MatTuple) -> Result<CMat> + Send + Sync + 'static,
    ) -> Self {
        ClosureMap {
            arity,
            space,
            name: name.into(),
            f: Box::new(f),
        }
    }
}

impl NcMap for ClosureMap {
    fn arity(&self) -> usize {
        self.arity
    }

    fn space(&self) -> Space {
        self.space
    }

    fn eval(&self, x: &MatTuple) -> Result<CMat> {
        if x.arity() != self.arity {
            return Err(NcError::KindMismatch(format!(
                "`{}` takes {} matrices",
                self.name, self.arity
            )));
        }
        (self.f)(x)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::pauli::*;
    use crate::matcore::I;

    fn f(text: &str, d: usize) -> NcFunction {
        NcFunction::parse(text, VarKind::ComplexVars(d)).unwrap()
    }

    #[test]
    fn square_of_pauli() {
        let sq = f("X1*X1", 1);
        assert_eq!(sq.eval(&MatTuple::single(sigma_x())).unwrap(), CMat::identity(2));
        let x = &sigma_x() + &sigma_z().scale(I);
        assert!(sq.eval(&MatTuple::single(x)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn constant_is_scalar_identity() {
        let c = f("2+0i", 1);
        let v = c.eval(&MatTuple::single(CMat::zeros(3, 3))).unwrap();
        assert_eq!(v, CMat::scalar(3, num_complex::Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn gram_root_always_in_domain() {
        let w2 = f("sqrtm(X1' X1)", 1);
        let x = MatTuple::single(CMat::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]));
        assert!(w2.check_domain(&x).ok);
        let r = w2.eval(&x).unwrap();
        assert!((&r - &CMat::from_real_diag(&[0.0, 1.0])).max_abs() < 1e-12);
    }

    #[test]
    fn sqrt_of_negative_is_refused() {
        let w = f("sqrtm(X1)", 1);
        let x = MatTuple::single(CMat::identity(2).scale_re(-1.0));
        let v = w.check_domain(&x);
        assert!(!v.ok);
        assert_eq!(v.min_eigenvalue, Some(-1.0));
        assert!(matches!(w.eval(&x), Err(NcError::NotPsd { .. })));
    }

    #[test]
    fn kind_and_guard_errors() {
        let sq = f("X1*X1", 1);
        let two = MatTuple::new(vec![sigma_x(), sigma_z()]).unwrap();
        assert!(matches!(sq.eval(&two), Err(NcError::KindMismatch(_))));
        let u = NcFunction::parse("A1 A1 - B1 B1", VarKind::RealPairs(1)).unwrap();
        let non_herm = MatTuple::new(vec![sigma_x().scale(I), sigma_z()]).unwrap();
        assert!(matches!(u.eval(&non_herm), Err(NcError::DomainViolation(_))));
        let guarded = sq.with_guard(DomainGuard::NormLt(0.5));
        assert!(matches!(
            guarded.eval(&MatTuple::single(sigma_x())),
            Err(NcError::DomainViolation(_))
        ));
        assert!(matches!(
            NcFunction::new(NcExpr::var(3), VarKind::ComplexVars(2)),
            Err(NcError::Arity { .. })
        ));
    }
}
