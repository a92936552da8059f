use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use super::cr::{du_dv, DerivRoute};
use crate::calculus::{delta_op, StepSchedule};
use crate::error::{NcError, Result};
use crate::matcore::interchange::tuple_to_value;
use crate::matcore::{block2_assemble, block2_extract, CMat, MatTuple, I};
use crate::ncexpr::NcMap;
use crate::report::{CheckReport, Tolerances};

/// `([[A, Z₁], [Z₁*, C]], [[B, Z₂], [Z₂*, D]])` componentwise.
fn block_pair_point(
    a: &MatTuple,
    b: &MatTuple,
    c: &MatTuple,
    d: &MatTuple,
    z1: &MatTuple,
    z2: &MatTuple,
) -> Result<MatTuple> {
    let build = |p: &MatTuple, q: &MatTuple, z: &MatTuple| -> Result<Vec<CMat>> {
        (0..p.arity())
            .map(|k| block2_assemble(p.get(k), z.get(k), &z.get(k).adjoint(), q.get(k)))
            .collect()
    };
    let mut mats = build(a, c, z1)?;
    mats.extend(build(b, d, z2)?);
    MatTuple::new(mats)
}

fn check_arities(tuples: &[&MatTuple]) -> Result<()> {
    let d = tuples[0].arity();
    match tuples.iter().find(|t| t.arity() != d) {
        Some(t) => Err(NcError::ArityMismatch {
            expected: d,
            got: t.arity(),
        }),
        None => Ok(()),
    }
}

fn blocks_residual(got: &CMat, n: usize, tl: &CMat, tr: &CMat, br: &CMat) -> Result<(f64, f64)> {
    let g = block2_extract(got, n)?;
    let diag = (&g.top_left - tl)
        .frobenius_norm()
        .max((&g.bottom_right - br).frobenius_norm());
    let off = (&g.top_right - tr)
        .frobenius_norm()
        .max((&g.bottom_left - &tr.adjoint()).frobenius_norm());
    Ok((diag, off))
}

/// Evaluates `u` and `v` at the block point
/// `E = [[A, ½Z], [½Z*, C]]`, `F = [[B, −(i/2)Z], [(i/2)Z*, D]]`, whose
/// complexification is `[[X, Z], [0, Y]]`, and compares with
/// `[[u(A,B), T₁], [T₁*, u(C,D)]]` and `[[v(A,B), T₂], [T₂*, v(C,D)]]` where
/// `T₁ = ½Δf(X,Y)(Z)` and `T₂ = −(i/2)Δf(X,Y)(Z)`.
///
/// When `X = Y` it also checks `Du(A,B)(Z₁,Z₂) = T₁ + T₁*` and
/// `Dv(A,B)(Z₁,Z₂) = T₂ + T₂*` for `Z = Z₁ + iZ₂`, with finite differences.
#[allow(clippy::too_many_arguments)]
pub fn diag_respect_check(
    u: &dyn NcMap,
    v: &dyn NcMap,
    f: &dyn NcMap,
    x: &MatTuple,
    y: &MatTuple,
    z: &MatTuple,
    sched: &StepSchedule,
    tols: &Tolerances,
) -> Result<CheckReport> {
    check_arities(&[x, y, z])?;
    let n = x.dim();
    let (a, b) = x.real_imag_parts();
    let (c, d) = y.real_imag_parts();
    let half = z.scale_re(0.5);
    let point = block_pair_point(&a, &b, &c, &d, &half, &z.scale(Complex64::new(0.0, -0.5)))?;
    let delta = delta_op(f, x, y, z, Complex64::new(1.0, 0.0))?.value;
    let t1 = delta.scale_re(0.5);
    let t2 = delta.scale(Complex64::new(0.0, -0.5));
    let (ab, cd) = (a.concat(&b)?, c.concat(&d)?);
    let (u_diag, u_off) = blocks_residual(&u.eval(&point)?, n, &u.eval(&ab)?, &t1, &u.eval(&cd)?)?;
    let (v_diag, v_off) = blocks_residual(&v.eval(&point)?, n, &v.eval(&ab)?, &t2, &v.eval(&cd)?)?;
    let block_residual = u_diag.max(u_off).max(v_diag).max(v_off);
    let mut rep = CheckReport::graded("diag_respect", block_residual, tols.block_identity, tols.fail_threshold)
        .with_witness(json!({ "X": tuple_to_value(x), "Y": tuple_to_value(y), "Z": tuple_to_value(z) }))
        .metric("u_diagonal", u_diag)
        .metric("u_offdiagonal", u_off)
        .metric("v_diagonal", v_diag)
        .metric("v_offdiagonal", v_off);
    if x == y {
        let (z1, z2) = z.real_imag_parts();
        let route = DerivRoute::FiniteDifference(sched.clone());
        let (du, dv) = du_dv(u, v, &route, &ab, &z1, &z2)?;
        let want_u = t1.checked_add(&t1.adjoint())?;
        let want_v = t2.checked_add(&t2.adjoint())?;
        let deriv = (&du - &want_u).frobenius_norm().max((&dv - &want_v).frobenius_norm());
        rep = rep.metric("derivative", deriv);
        if deriv > tols.fd {
            rep = rep.fail_because("Du, Dv differ from T + T* at X = Y");
        }
    }
    Ok(rep)
}

/// Whether the diagonal blocks of `w(E,F)` at
/// `(E,F) = ([[A, Z₁], [Z₁*, C]], [[B, Z₂], [Z₂*, D]])` are `w(A,B)` and
/// `w(C,D)`.
pub fn diag_blocks_check(
    w: &dyn NcMap,
    ab: (&MatTuple, &MatTuple),
    cd: (&MatTuple, &MatTuple),
    z1: &MatTuple,
    z2: &MatTuple,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let (a, b) = ab;
    let (c, d) = cd;
    check_arities(&[a, b, c, d, z1, z2])?;
    let n = a.dim();
    let point = block_pair_point(a, b, c, d, z1, z2)?;
    let g = block2_extract(&w.eval(&point)?, n)?;
    let residual = (&g.top_left - &w.eval(&a.concat(b)?)?)
        .frobenius_norm()
        .max((&g.bottom_right - &w.eval(&c.concat(d)?)?).frobenius_norm());
    Ok(
        CheckReport::graded("diag_blocks", residual, tols.block_identity, tols.fail_threshold).with_witness(json!({
            "A": tuple_to_value(a),
            "B": tuple_to_value(b),
            "C": tuple_to_value(c),
            "D": tuple_to_value(d),
            "Z1": tuple_to_value(z1),
            "Z2": tuple_to_value(z2),
        })),
    )
}

/// Truth of the two pairs of identities
/// `Z₁Z₁* = Z₂Z₂*, Z₁*Z₁ = Z₂*Z₂` and `Z₁Z₂* = −Z₂Z₁*, Z₁*Z₂ = −Z₂*Z₁`,
/// with the distances from `Z₂` to `±iZ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagConditions {
    pub con1: bool,
    pub con2: bool,
    pub con1_residual: f64,
    pub con2_residual: f64,
    pub tolerance: f64,
    /// `‖Z₂ − iZ₁‖`
    pub dist_plus_i: f64,
    /// `‖Z₂ + iZ₁‖`
    pub dist_minus_i: f64,
}

impl DiagConditions {
    pub fn both(&self) -> bool {
        self.con1 && self.con2
    }
}

pub fn diag_conditions_demo(z1: &MatTuple, z2: &MatTuple) -> Result<DiagConditions> {
    if z1.arity() != z2.arity() || z1.shape() != z2.shape() {
        return Err(NcError::ShapeMismatch(format!(
            "Z1 is {}x{:?}, Z2 is {}x{:?}",
            z1.arity(),
            z1.shape(),
            z2.arity(),
            z2.shape()
        )));
    }
    let mut con1: f64 = 0.0;
    let mut con2: f64 = 0.0;
    for (p, q) in z1.iter().zip(z2.iter()) {
        let (ps, qs) = (p.adjoint(), q.adjoint());
        con1 = con1
            .max((&(p * &ps) - &(q * &qs)).frobenius_norm())
            .max((&(&ps * p) - &(&qs * q)).frobenius_norm());
        con2 = con2
            .max((&(p * &qs) + &(q * &ps)).frobenius_norm())
            .max((&(&ps * q) + &(&qs * p)).frobenius_norm());
    }
    let scale = z1.frobenius_norm().max(z2.frobenius_norm()).max(1.0);
    let tolerance = 1e-10 * scale * scale;
    let iz1 = z1.scale(I);
    Ok(DiagConditions {
        con1: con1 <= tolerance,
        con2: con2 <= tolerance,
        con1_residual: con1,
        con2_residual: con2,
        tolerance,
        dist_plus_i: z2.sub(&iz1)?.frobenius_norm(),
        dist_minus_i: z2.add(&iz1)?.frobenius_norm(),
    })
}
