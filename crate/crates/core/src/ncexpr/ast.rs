use num_complex::Complex64;

use crate::error::{NcError, Result};

/// Free nc expression over matrix variables.
///
/// `Const(c)` denotes `c·I_n` at size `n`. The canonical form never has a
/// `Const` as the left factor of a `Mul`; the parser turns such products
/// into `ScalarMul`.
#[derive(Debug, Clone, PartialEq)]
pub enum NcExpr {
    Var(usize),
    Const(Complex64),
    Add(Box<NcExpr>, Box<NcExpr>),
    Sub(Box<NcExpr>, Box<NcExpr>),
    Mul(Box<NcExpr>, Box<NcExpr>),
    ScalarMul(Complex64, Box<NcExpr>),
    Adjoint(Box<NcExpr>),
    SqrtPos(Box<NcExpr>),
}

// tree builders; `NcExpr` deliberately has no operator overloads
#[allow(clippy::should_implement_trait)]
impl NcExpr {
    pub fn var(i: usize) -> Self {
        NcExpr::Var(i)
    }

    pub fn constant(re: f64, im: f64) -> Self {
        NcExpr::Const(Complex64::new(re, im))
    }

    pub fn add(l: NcExpr, r: NcExpr) -> Self {
        NcExpr::Add(Box::new(l), Box::new(r))
    }

    pub fn sub(l: NcExpr, r: NcExpr) -> Self {
        NcExpr::Sub(Box::new(l), Box::new(r))
    }

    pub fn mul(l: NcExpr, r: NcExpr) -> Self {
        NcExpr::Mul(Box::new(l), Box::new(r))
    }

    pub fn scalar_mul(c: Complex64, e: NcExpr) -> Self {
        NcExpr::ScalarMul(c, Box::new(e))
    }

    pub fn adjoint(e: NcExpr) -> Self {
        NcExpr::Adjoint(Box::new(e))
    }

    pub fn sqrt_pos(e: NcExpr) -> Self {
        NcExpr::SqrtPos(Box::new(e))
    }

    /// True when the expression uses neither adjoints nor square roots, so
    /// it is a free polynomial and hence an nc function on every level.
    pub fn is_polynomial(&self) -> bool {
        match self {
            NcExpr::Var(_) | NcExpr::Const(_) => true,
            NcExpr::Add(l, r) | NcExpr::Sub(l, r) | NcExpr::Mul(l, r) => l.is_polynomial() && r.is_polynomial(),
            NcExpr::ScalarMul(_, e) => e.is_polynomial(),
            NcExpr::Adjoint(_) | NcExpr::SqrtPos(_) => false,
        }
    }

    pub fn max_var(&self) -> Option<usize> {
        match self {
            NcExpr::Var(i) => Some(*i),
            NcExpr::Const(_) => None,
            NcExpr::Add(l, r) | NcExpr::Sub(l, r) | NcExpr::Mul(l, r) => l.max_var().max(r.max_var()),
            NcExpr::ScalarMul(_, e) | NcExpr::Adjoint(e) | NcExpr::SqrtPos(e) => e.max_var(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            NcExpr::Var(_) | NcExpr::Const(_) => 1,
            NcExpr::Add(l, r) | NcExpr::Sub(l, r) | NcExpr::Mul(l, r) => 1 + l.depth().max(r.depth()),
            NcExpr::ScalarMul(_, e) | NcExpr::Adjoint(e) | NcExpr::SqrtPos(e) => 1 + e.depth(),
        }
    }

    pub(crate) fn visit_sqrt_args<'a>(&'a self, out: &mut Vec<&'a NcExpr>) {
        match self {
            NcExpr::Var(_) | NcExpr::Const(_) => {}
            NcExpr::Add(l, r) | NcExpr::Sub(l, r) | NcExpr::Mul(l, r) => {
                l.visit_sqrt_args(out);
                r.visit_sqrt_args(out);
            }
            NcExpr::ScalarMul(_, e) | NcExpr::Adjoint(e) => e.visit_sqrt_args(out),
            NcExpr::SqrtPos(e) => {
                out.push(e);
                e.visit_sqrt_args(out);
            }
        }
    }
}

/// How the variables of an expression are named and what points it takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// `X1..X_d` over `(C^{n×n})^d`.
    ComplexVars(usize),
    /// `A1..A_d, B1..B_d` over Hermitian pairs; `B_k` is variable `d + k − 1`.
    RealPairs(usize),
}

impl VarKind {
    /// Number of matrix arguments a point carries.
    pub fn arity(&self) -> usize {
        match *self {
            VarKind::ComplexVars(d) => d,
            VarKind::RealPairs(d) => 2 * d,
        }
    }

    pub fn d(&self) -> usize {
        match *self {
            VarKind::ComplexVars(d) | VarKind::RealPairs(d) => d,
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, VarKind::RealPairs(_))
    }

    pub fn var_name(&self, index: usize) -> String {
        match *self {
            VarKind::ComplexVars(_) => format!("X{}", index + 1),
            VarKind::RealPairs(d) if index < d => format!("A{}", index + 1),
            VarKind::RealPairs(d) => format!("B{}", index - d + 1),
        }
    }

    /// Resolves a variable name to its index.
    pub fn lookup(&self, name: &str) -> Result<usize> {
        let unknown = || NcError::UnknownVariable(name.to_string());
        let (head, digits) = name.split_at(1.min(name.len()));
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(unknown());
        }
        let k: usize = digits.parse().map_err(|_| unknown())?;
        if k == 0 {
            return Err(unknown());
        }
        let d = self.d();
        let offset = match (self, head) {
            (VarKind::ComplexVars(_), "X") => 0,
            (VarKind::RealPairs(_), "A") => 0,
            (VarKind::RealPairs(_), "B") => d,
            _ => return Err(unknown()),
        };
        if k > d {
            return Err(NcError::Arity {
                name: name.to_string(),
                arity: d,
            });
        }
        Ok(offset + k - 1)
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_const(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("({}{}{}i)", fmt_f64(c.re), sign, fmt_f64(c.im.abs()))
}

/// Canonical text form; `parse(serialize(e))` reproduces `e` for every
/// expression in canonical form.
pub fn serialize(expr: &NcExpr, vars: VarKind) -> String {
    let mut out = String::new();
    write_expr(expr, vars, &mut out);
    out
}

// Precedence levels: 0 sum, 1 product, 2 atom.
fn level(e: &NcExpr) -> u8 {
    match e {
        NcExpr::Add(..) | NcExpr::Sub(..) => 0,
        NcExpr::Mul(..) | NcExpr::ScalarMul(..) => 1,
        _ => 2,
    }
}

fn write_wrapped(e: &NcExpr, vars: VarKind, min_level: u8, out: &mut String) {
    if level(e) < min_level {
        out.push('(');
        write_expr(e, vars, out);
        out.push(')');
    } else {
        write_expr(e, vars, out);
    }
}

fn write_expr(expr: &NcExpr, vars: VarKind, out: &mut String) {
    match expr {
        NcExpr::Var(i) => out.push_str(&vars.var_name(*i)),
        NcExpr::Const(c) => out.push_str(&fmt_const(*c)),
        NcExpr::Add(l, r) | NcExpr::Sub(l, r) => {
            write_expr(l, vars, out);
            out.push_str(if matches!(expr, NcExpr::Add(..)) { " + " } else { " - " });
            write_wrapped(r, vars, 1, out);
        }
        NcExpr::Mul(l, r) => {
            write_wrapped(l, vars, 1, out);
            out.push('*');
            write_wrapped(r, vars, 2, out);
        }
        NcExpr::ScalarMul(c, e) => {
            out.push_str(&fmt_const(*c));
            out.push('*');
            write_wrapped(e, vars, 2, out);
        }
        NcExpr::Adjoint(e) => {
            // `X1''` is not in the grammar, so nested adjoints get parentheses.
            if matches!(**e, NcExpr::Adjoint(_)) {
                out.push('(');
                write_expr(e, vars, out);
                out.push(')');
            } else {
                write_wrapped(e, vars, 2, out);
            }
            out.push('\'');
        }
        NcExpr::SqrtPos(e) => {
            out.push_str("sqrtm(");
            write_expr(e, vars, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_basic_forms() {
        let v = VarKind::ComplexVars(1);
        assert_eq!(serialize(&NcExpr::mul(NcExpr::var(0), NcExpr::var(0)), v), "X1*X1");
        assert_eq!(serialize(&NcExpr::adjoint(NcExpr::var(0)), v), "X1'");
        assert_eq!(
            serialize(&NcExpr::adjoint(NcExpr::adjoint(NcExpr::var(0))), v),
            "(X1')'"
        );
        assert_eq!(serialize(&NcExpr::constant(2.0, -0.5), v), "(2.0-0.5i)");
    }

    #[test]
    fn var_lookup() {
        let v = VarKind::RealPairs(2);
        assert_eq!(v.lookup("A1").unwrap(), 0);
        assert_eq!(v.lookup("B2").unwrap(), 3);
        assert!(matches!(v.lookup("X1"), Err(NcError::UnknownVariable(_))));
        assert!(matches!(v.lookup("A3"), Err(NcError::Arity { .. })));
        assert!(matches!(v.lookup("A0"), Err(NcError::UnknownVariable(_))));
        assert_eq!(v.var_name(3), "B2");
    }

    #[test]
    fn polynomial_classification() {
        let p = NcExpr::add(NcExpr::mul(NcExpr::var(0), NcExpr::var(1)), NcExpr::constant(1.0, 0.0));
        assert!(p.is_polynomial());
        assert!(!NcExpr::adjoint(p.clone()).is_polynomial());
        assert!(!NcExpr::sqrt_pos(p).is_polynomial());
    }
}
