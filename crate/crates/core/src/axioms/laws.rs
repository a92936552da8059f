use serde_json::json;

use crate::error::{NcError, Result};
use crate::matcore::interchange::{mat_to_value, tuple_to_value};
use crate::matcore::{direct_sum, op_norm, unitarity_residual, CMat, MatTuple, HERM_TOL};
use crate::ncexpr::{NcMap, Space};
use crate::report::{CheckReport, Tolerances};

const UNITARY_TOL: f64 = 1e-10;
const INTERTWINER_TOL: f64 = 1e-10;
/// Largest relative non-Hermitian drift of `SXS⁻¹` that is still treated
/// as rounding when `w` lives on Hermitian tuples.
const CONJUGATE_HERM_SLACK: f64 = 1e-8;

/// `S·M·S⁻¹` for every component, re-Hermitized for Hermitian-space maps.
pub(crate) fn conjugate(w: &dyn NcMap, x: &MatTuple, s: &CMat, s_inv: &CMat) -> Result<MatTuple> {
    let y = x.map(|m| &(s * m) * s_inv);
    if w.space() == Space::Hermitian {
        let drift = y.hermitian_deviation();
        let scale = y.frobenius_norm().max(1.0);
        if drift > CONJUGATE_HERM_SLACK * scale {
            return Err(NcError::DomainViolation(format!(
                "conjugated point is not Hermitian (deviation {drift:e})"
            )));
        }
        return Ok(y.map(CMat::hermitian_part));
    }
    Ok(y)
}

/// `‖w(X⊕Y) − w(X)⊕w(Y)‖`.
pub fn check_direct_sums(w: &dyn NcMap, x: &MatTuple, y: &MatTuple, tols: &Tolerances) -> Result<CheckReport> {
    let lhs = w.eval(&direct_sum(x, y)?)?;
    let rhs = w.eval(x)?.direct_sum(&w.eval(y)?);
    let residual = lhs.checked_sub(&rhs)?.frobenius_norm();
    Ok(
        CheckReport::graded("direct_sums", residual, tols.direct_sum, tols.fail_threshold)
            .with_witness(json!({ "X": tuple_to_value(x), "Y": tuple_to_value(y) })),
    )
}

/// `‖w(UXU*) − U·w(X)·U*‖`.
pub fn check_unitary_equiv(w: &dyn NcMap, x: &MatTuple, u: &CMat, tols: &Tolerances) -> Result<CheckReport> {
    let dev = unitarity_residual(u);
    if dev > UNITARY_TOL {
        return Err(NcError::NotUnitary { residual: dev });
    }
    let ua = u.adjoint();
    let y = conjugate(w, x, u, &ua)?;
    let rhs = &(u * &w.eval(x)?) * &ua;
    let residual = w.eval(&y)?.checked_sub(&rhs)?.frobenius_norm();
    Ok(
        CheckReport::graded("unitary_equiv", residual, tols.algebraic, tols.fail_threshold)
            .with_witness(json!({ "X": tuple_to_value(x), "U": mat_to_value(u) })),
    )
}

/// `‖w(SXS⁻¹) − S·w(X)·S⁻¹‖ / max(1, cond S)`.
pub fn check_similarity(w: &dyn NcMap, x: &MatTuple, s: &CMat, tols: &Tolerances) -> Result<CheckReport> {
    let s_inv = s.inverse()?;
    let cond = op_norm(s) * op_norm(&s_inv);
    let y = conjugate(w, x, s, &s_inv)?;
    let rhs = &(s * &w.eval(x)?) * &s_inv;
    let raw = w.eval(&y)?.checked_sub(&rhs)?.frobenius_norm();
    let residual = raw / cond.max(1.0);
    Ok(
        CheckReport::graded("similarity", residual, tols.algebraic, tols.fail_threshold)
            .with_witness(json!({ "X": tuple_to_value(x), "S": mat_to_value(s) }))
            .metric("cond", cond)
            .metric("raw_residual", raw),
    )
}

/// Largest `‖X_k T − T Y_k‖` over the components.
pub fn intertwining_defect(x: &MatTuple, y: &MatTuple, t: &CMat) -> Result<f64> {
    if x.arity() != y.arity() {
        return Err(NcError::ArityMismatch {
            expected: x.arity(),
            got: y.arity(),
        });
    }
    let mut worst: f64 = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        worst = worst.max(a.checked_mul(t)?.checked_sub(&t.checked_mul(b)?)?.frobenius_norm());
    }
    Ok(worst)
}

pub(crate) fn require_intertwiner(x: &MatTuple, y: &MatTuple, t: &CMat) -> Result<f64> {
    let defect = intertwining_defect(x, y, t)?;
    let scale = op_norm(t) * (x.norm() + y.norm()).max(1.0);
    if defect > INTERTWINER_TOL * scale.max(1.0) {
        return Err(NcError::NotIntertwiner { residual: defect });
    }
    if !x.is_hermitian(HERM_TOL) || !y.is_hermitian(HERM_TOL) {
        return Err(NcError::NotHermitian {
            deviation: x.hermitian_deviation().max(y.hermitian_deviation()),
        });
    }
    Ok(defect)
}

/// `‖w(X)T − T·w(Y)‖` for Hermitian `X, Y` with `XT = TY`.
pub fn check_intertwining(
    w: &dyn NcMap,
    x: &MatTuple,
    y: &MatTuple,
    t: &CMat,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let defect = require_intertwiner(x, y, t)?;
    let residual = (&(&w.eval(x)? * t) - &(t * &w.eval(y)?)).frobenius_norm();
    Ok(
        CheckReport::graded("intertwining", residual, tols.algebraic, tols.fail_threshold)
            .with_witness(json!({ "X": tuple_to_value(x), "Y": tuple_to_value(y), "T": mat_to_value(t) }))
            .metric("intertwining_defect", defect),
    )
}

/// `S·w(X)·S⁻¹`, the value of the similarity-envelope extension at `SXS⁻¹`.
pub fn extend_by_similarity(w: &dyn NcMap, x: &MatTuple, s: &CMat) -> Result<CMat> {
    let s_inv = s.inverse()?;
    Ok(&(s * &w.eval(x)?) * &s_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::pauli::*;
    use crate::matcore::random::{gaussian_tuple, herm_tuple, invertible, unitary};
    use crate::matcore::RandomStream;
    use crate::ncexpr::{NcFunction, VarKind};
    use crate::report::Verdict;

    fn cf(text: &str) -> NcFunction {
        NcFunction::parse(text, VarKind::ComplexVars(1)).unwrap()
    }

    #[test]
    fn adjoint_fails_similarity_on_shear_witness() {
        let tols = Tolerances::default();
        let w1 = cf("X1'");
        let x = MatTuple::single(CMat::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]));
        let s = CMat::from_real_diag(&[1.0, 2.0]);
        let rep = check_similarity(&w1, &x, &s, &tols).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.residual > 0.1);
        // raw residual: ‖[[0,0],[½,0]] − [[0,0],[2,0]]‖ = 3/2, cond 2
        assert!((rep.metrics["raw_residual"] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn polynomial_passes_every_law() {
        let tols = Tolerances::default();
        let f = cf("X1 X1 X1 - (1+2i) X1 + 3");
        let mut rng = RandomStream::new(41).rng();
        let x = gaussian_tuple(&mut rng, 1, 3, 3);
        let y = gaussian_tuple(&mut rng, 1, 2, 2);
        assert!(check_direct_sums(&f, &x, &y, &tols).unwrap().passed());
        assert!(check_unitary_equiv(&f, &x, &unitary(&mut rng, 3), &tols)
            .unwrap()
            .passed());
        assert!(check_similarity(&f, &x, &invertible(&mut rng, 3).unwrap(), &tols)
            .unwrap()
            .passed());
        assert_eq!(
            check_unitary_equiv(&f, &x, &CMat::identity(3), &tols).unwrap().residual,
            0.0
        );
    }

    #[test]
    fn gram_root_respects_unitary_equivalence() {
        let tols = Tolerances::default();
        let w2 = cf("sqrtm(X1' X1)").restricted_to_hermitian();
        let mut rng = RandomStream::new(42).rng();
        let x = herm_tuple(&mut rng, 1, 4);
        assert!(check_unitary_equiv(&w2, &x, &unitary(&mut rng, 4), &tols)
            .unwrap()
            .passed());
        assert!(matches!(
            check_unitary_equiv(&w2, &x, &CMat::identity(4).scale_re(1.1), &tols),
            Err(NcError::NotUnitary { .. })
        ));
    }

    #[test]
    fn intertwining_trivial_cases() {
        let tols = Tolerances::default();
        let w = cf("sqrtm(X1*X1)").restricted_to_hermitian();
        let x = MatTuple::single(sigma_z());
        let y = MatTuple::single(sigma_x());
        assert!(check_intertwining(&w, &x, &y, &CMat::zeros(2, 2), &tols)
            .unwrap()
            .passed());
        assert!(check_intertwining(&w, &x, &x, &CMat::identity(2), &tols)
            .unwrap()
            .passed());
        assert!(matches!(
            check_intertwining(&w, &x, &y, &CMat::identity(2), &tols),
            Err(NcError::NotIntertwiner { .. })
        ));
    }

    #[test]
    fn extension_is_hermitian_for_unitary_conjugation() {
        let w = cf("X1 X1 X1").restricted_to_hermitian();
        let mut rng = RandomStream::new(43).rng();
        let x = herm_tuple(&mut rng, 1, 3);
        assert_eq!(
            extend_by_similarity(&w, &x, &CMat::identity(3)).unwrap(),
            w.eval(&x).unwrap()
        );
        let u = unitary(&mut rng, 3);
        let e = extend_by_similarity(&w, &x, &u).unwrap();
        assert!(e.hermitian_deviation() < 1e-13);
    }
}
