use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use super::cr::{cr_residual, du_dv, DerivRoute};
use super::Reconstructed;
use crate::error::{NcError, Result};
use crate::matcore::interchange::{mat_to_value, tuple_to_value};
use crate::matcore::{CMat, MatOrTuple, MatTuple, I};
use crate::ncexpr::NcMap;
use crate::report::{CheckReport, Tolerances};

/// The scalars `z = r·e^{iθ}` probed by [`homogeneity_check`], as (label, r, θ).
pub const HOMOGENEITY_SAMPLES: [(&str, f64, f64); 4] = [
    ("i", 1.0, PI / 2.0),
    ("-1", 1.0, PI),
    ("e^(i*pi/3)", 1.0, PI / 3.0),
    ("2e^(-i*pi/4)", 2.0, -PI / 4.0),
];

fn tilde_d(rec: &Reconstructed, route: &DerivRoute, ab: &MatTuple, z1: &MatTuple, z2: &MatTuple) -> Result<CMat> {
    let (du, dv) = du_dv(rec.u.as_ref(), rec.v.as_ref(), route, ab, z1, z2)?;
    du.checked_add(&dv.scale(I))
}

fn single_matrix(t: &MatOrTuple) -> Result<CMat> {
    match t {
        MatOrTuple::Mat(m) => Ok(m.clone()),
        MatOrTuple::Tuple(tt) if tt.iter().all(|m| m == tt.get(0)) => Ok(tt.get(0).clone()),
        MatOrTuple::Tuple(_) => Err(NcError::KindMismatch(
            "the commutator identity needs one matrix T shared by all components".into(),
        )),
    }
}

/// `D̃f(X)([T,X]) = [T, f(X)]` with `D̃f = Du + iDv`, where `[T,X]` is fed to
/// `u` and `v` as `Z₁ = [iT₁,B] + [iT₂,A]`, `Z₂ = [iT₁,−A] + [iT₂,B]`.
pub fn commutator_identity_check(
    rec: &Reconstructed,
    route: &DerivRoute,
    x: &MatTuple,
    t: &MatOrTuple,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let t = single_matrix(t)?;
    let (t1, t2) = (t.hermitian_part(), t.imaginary_part());
    let (it1, it2) = (t1.scale(I), t2.scale(I));
    let (a, b) = x.real_imag_parts();
    let z1 = a.try_zip(&b, |ak, bk| it1.commutator(bk)?.checked_add(&it2.commutator(ak)?))?;
    let z2 = a.try_zip(&b, |ak, bk| {
        it1.commutator(&ak.scale_re(-1.0))?.checked_add(&it2.commutator(bk)?)
    })?;
    let split_residual = x
        .try_zip(&MatTuple::complexify(&z1, &z2)?, |xk, zk| {
            t.commutator(xk)?.checked_sub(zk)
        })?
        .frobenius_norm();
    let ab = a.concat(&b)?;
    let lhs = tilde_d(rec, route, &ab, &z1, &z2)?;
    let rhs = t.commutator(&rec.eval(x)?)?;
    let residual = (&lhs - &rhs).frobenius_norm();
    let tol = match route {
        DerivRoute::Algebraic(_) => tols.cr_algebraic,
        DerivRoute::FiniteDifference(_) => tols.fd,
    };
    Ok(
        CheckReport::graded("commutator_identity", residual, tol, tols.fail_threshold)
            .with_witness(json!({ "X": tuple_to_value(x), "T": mat_to_value(&t) }))
            .metric("split_residual", split_residual)
            .note(format!("route: {}", route.name())),
    )
}

/// `D̃f(X)(zZ) = z·D̃f(X)(Z)` for the scalars in [`HOMOGENEITY_SAMPLES`].
/// Skipped with cause `CrViolated` when the Cauchy–Riemann residual at
/// `(X, Z)` is already above tolerance.
pub fn homogeneity_check(
    rec: &Reconstructed,
    route: &DerivRoute,
    x: &MatTuple,
    z: &MatTuple,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let (a, b) = x.real_imag_parts();
    let (z1, z2) = z.real_imag_parts();
    let ab = a.concat(&b)?;
    let witness = json!({ "X": tuple_to_value(x), "Z": tuple_to_value(z) });
    let cr = cr_residual(rec.u.as_ref(), rec.v.as_ref(), route, &ab, &z1, &z2)?;
    if cr > tols.fd {
        return Ok(CheckReport::skipped("homogeneity", "CrViolated", tols.fd)
            .with_witness(witness)
            .metric("cr_residual", cr));
    }
    let base = tilde_d(rec, route, &ab, &z1, &z2)?;
    let mut residual: f64 = 0.0;
    let mut rep_metrics = Vec::new();
    for &(label, r, theta) in &HOMOGENEITY_SAMPLES {
        let zc = Complex64::from_polar(r, theta);
        // zZ = (Re z·Z₁ − Im z·Z₂) + i(Im z·Z₁ + Re z·Z₂)
        let z1r = z1.try_zip(&z2, |p, q| p.scale_re(zc.re).checked_sub(&q.scale_re(zc.im)))?;
        let z2r = z1.try_zip(&z2, |p, q| p.scale_re(zc.im).checked_add(&q.scale_re(zc.re)))?;
        let rotated = tilde_d(rec, route, &ab, &z1r, &z2r)?;
        let res = (&rotated - &base.scale(zc)).frobenius_norm();
        rep_metrics.push((format!("z={label}"), res));
        residual = residual.max(res);
    }
    let mut rep = CheckReport::graded("homogeneity", residual, tols.fd, tols.fail_threshold)
        .with_witness(witness)
        .metric("cr_residual", cr);
    for (k, v) in rep_metrics {
        rep = rep.metric(&k, v);
    }
    Ok(rep)
}
