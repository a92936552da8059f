use num_complex::Complex64;

use super::{DerivMethod, DerivativeReport};
use crate::error::{NcError, Result};
use crate::matcore::{block2_assemble, block2_extract_rect, CMat, MatTuple};
use crate::ncexpr::NcMap;

const BLOCK_TOL: f64 = 1e-9;
const R_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaValue {
    pub value: CMat,
    /// Largest deviation of the diagonal and lower-left blocks from
    /// `f(X)`, `f(Y)` and `0`.
    pub block_residual: f64,
}

fn refuse_involutive(f: &dyn NcMap) -> Result<()> {
    if let Some(nf) = f.as_nc_function() {
        if !nf.is_polynomial() {
            return Err(NcError::MethodRefused(format!(
                "`{}` uses adjoints or square roots; the block formula needs an nc polynomial",
                nf.text()
            )));
        }
    }
    Ok(())
}

/// `Δf(X,Y)(Z)`: the upper-right block of `f([[X, rZ], [0, Y]])`, divided by `r`.
pub fn delta_op(f: &dyn NcMap, x: &MatTuple, y: &MatTuple, z: &MatTuple, r: Complex64) -> Result<DeltaValue> {
    refuse_involutive(f)?;
    if r == Complex64::new(0.0, 0.0) {
        return Err(NcError::MethodRefused("r must be nonzero".into()));
    }
    let d = x.arity();
    if y.arity() != d || z.arity() != d {
        return Err(NcError::ArityMismatch {
            expected: d,
            got: if y.arity() != d { y.arity() } else { z.arity() },
        });
    }
    let (n, m) = (x.dim(), y.dim());
    if !x.is_square() || !y.is_square() || z.shape() != (n, m) {
        return Err(NcError::ShapeMismatch(format!(
            "X is {:?}, Y is {:?}, Z must be {n}x{m} but is {:?}",
            x.shape(),
            y.shape(),
            z.shape()
        )));
    }
    let point = MatTuple::new(
        (0..d)
            .map(|k| block2_assemble(x.get(k), &z.get(k).scale(r), &CMat::zeros(m, n), y.get(k)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let big = f.eval(&point)?;
    let blocks = block2_extract_rect(&big, n, n)?;
    let fx = f.eval(x)?;
    let fy = f.eval(y)?;
    let block_residual = (&blocks.top_left - &fx)
        .frobenius_norm()
        .max((&blocks.bottom_right - &fy).frobenius_norm())
        .max(blocks.bottom_left.frobenius_norm());
    if block_residual > BLOCK_TOL * big.frobenius_norm().max(1.0) {
        return Err(NcError::BlockStructureViolation {
            residual: block_residual,
        });
    }
    Ok(DeltaValue {
        value: blocks.top_right.scale(r.inv()),
        block_residual,
    })
}

/// `Df(X)(Z) = Δf(X,X)(Z)` at `r = 1`, cross-checked against `r = ½`.
pub fn g_derivative_algebraic(f: &dyn NcMap, x: &MatTuple, z: &MatTuple) -> Result<DerivativeReport> {
    let one = delta_op(f, x, x, z, Complex64::new(1.0, 0.0))?;
    let half = delta_op(f, x, x, z, Complex64::new(0.5, 0.0))?;
    let residual = (&one.value - &half.value).frobenius_norm();
    if residual > R_TOL * one.value.frobenius_norm().max(1.0) {
        return Err(NcError::InconsistentR { residual });
    }
    Ok(DerivativeReport {
        value: one.value,
        method: DerivMethod::AlgebraicBlock { r: 1.0, cross_r: 0.5 },
        cross_check_residual: residual,
        consistent: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random::{gaussian, gaussian_tuple};
    use crate::matcore::RandomStream;
    use crate::ncexpr::{ClosureMap, NcFunction, Space, VarKind};

    fn f(text: &str) -> NcFunction {
        NcFunction::parse(text, VarKind::ComplexVars(1)).unwrap()
    }

    #[test]
    fn square_gives_xz_plus_zy() {
        let mut rng = RandomStream::new(5).rng();
        let x = gaussian(&mut rng, 3, 3);
        let y = gaussian(&mut rng, 2, 2);
        let z = gaussian(&mut rng, 3, 2);
        let got = delta_op(
            &f("X1*X1"),
            &MatTuple::single(x.clone()),
            &MatTuple::single(y.clone()),
            &MatTuple::single(z.clone()),
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let want = &(&x * &z) + &(&z * &y);
        assert!((&got.value - &want).frobenius_norm() < 1e-12);
    }

    #[test]
    fn identity_and_constant() {
        let mut rng = RandomStream::new(6).rng();
        let x = gaussian_tuple(&mut rng, 1, 2, 2);
        let z = gaussian_tuple(&mut rng, 1, 2, 2);
        let id = delta_op(&f("X1"), &x, &x, &z, Complex64::new(0.3, 0.7)).unwrap();
        assert!((&id.value - z.get(0)).frobenius_norm() < 1e-14);
        let c = delta_op(&f("3-1i"), &x, &x, &z, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(c.value.max_abs(), 0.0);
    }

    #[test]
    fn cube_derivative() {
        let mut rng = RandomStream::new(7).rng();
        let x = gaussian(&mut rng, 3, 3);
        let z = gaussian(&mut rng, 3, 3);
        let rep = g_derivative_algebraic(
            &f("X1 X1 X1"),
            &MatTuple::single(x.clone()),
            &MatTuple::single(z.clone()),
        )
        .unwrap();
        let want = &(&(&(&x * &x) * &z) + &(&(&x * &z) * &x)) + &(&(&z * &x) * &x);
        assert!((&rep.value - &want).frobenius_norm() < 1e-12);
        assert!(rep.consistent);
    }

    #[test]
    fn involutive_expressions_are_refused() {
        let x = MatTuple::single(CMat::identity(2));
        for text in ["X1'", "sqrtm(X1' X1)"] {
            assert!(matches!(
                g_derivative_algebraic(&f(text), &x, &x),
                Err(NcError::MethodRefused(_))
            ));
        }
    }

    #[test]
    fn black_box_adjoint_breaks_block_structure() {
        let adj = ClosureMap::new("X*", 1, Space::Complex, |x| Ok(x.get(0).adjoint()));
        let x = MatTuple::single(CMat::identity(2));
        let z = MatTuple::single(CMat::identity(2));
        assert!(matches!(
            delta_op(&adj, &x, &x, &z, Complex64::new(1.0, 0.0)),
            Err(NcError::BlockStructureViolation { .. })
        ));
    }
}
