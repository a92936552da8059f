use std::sync::Arc;

use serde_json::json;

use super::Decomposition;
use crate::calculus::{g_derivative_algebraic, g_derivative_fd, StepSchedule};
use crate::error::{NcError, Result};
use crate::matcore::interchange::{herm_point_to_value, tuple_to_value};
use crate::matcore::random::herm_tuple;
use crate::matcore::{CMat, MatTuple, RandomStream};
use crate::ncexpr::{NcFunction, NcMap};
use crate::report::{sort_reports, CheckReport, Tolerances, Verdict};

/// How `Du` and `Dv` are obtained.
#[derive(Debug, Clone)]
pub enum DerivRoute {
    /// Central differences on `u` and `v` themselves.
    FiniteDifference(StepSchedule),
    /// Real and imaginary parts of the block derivative of the source `f`.
    Algebraic(Arc<NcFunction>),
}

impl DerivRoute {
    pub fn name(&self) -> &'static str {
        match self {
            DerivRoute::FiniteDifference(_) => "fd",
            DerivRoute::Algebraic(_) => "algebraic",
        }
    }
}

/// `(Du(A,B)(Z₁,Z₂), Dv(A,B)(Z₁,Z₂))` at the pair point `ab = (A, B)`.
pub fn du_dv(
    u: &dyn NcMap,
    v: &dyn NcMap,
    route: &DerivRoute,
    ab: &MatTuple,
    z1: &MatTuple,
    z2: &MatTuple,
) -> Result<(CMat, CMat)> {
    let unavailable = |e: NcError| NcError::DerivativeUnavailable(e.to_string());
    match route {
        DerivRoute::FiniteDifference(sched) => {
            let dir = z1.concat(z2)?;
            let du = g_derivative_fd(u, ab, &dir, sched).map_err(unavailable)?;
            let dv = g_derivative_fd(v, ab, &dir, sched).map_err(unavailable)?;
            Ok((du.value, dv.value))
        }
        DerivRoute::Algebraic(f) => {
            let (a, b) = ab.split_pair()?;
            let x = MatTuple::complexify(&a, &b)?;
            let z = MatTuple::complexify(z1, z2)?;
            let df = g_derivative_algebraic(f.as_ref(), &x, &z).map_err(unavailable)?;
            Ok((df.value.hermitian_part(), df.value.imaginary_part()))
        }
    }
}

/// `‖Du(A,B)(Z₁,Z₂) − Dv(A,B)(−Z₂,Z₁)‖`.
pub(crate) fn cr_residual(
    u: &dyn NcMap,
    v: &dyn NcMap,
    route: &DerivRoute,
    ab: &MatTuple,
    z1: &MatTuple,
    z2: &MatTuple,
) -> Result<f64> {
    let (du, _) = du_dv(u, v, route, ab, z1, z2)?;
    let (_, dv) = du_dv(u, v, route, ab, &z2.scale_re(-1.0), z1)?;
    Ok((&du - &dv).frobenius_norm())
}

/// One Cauchy–Riemann probe: a Hermitian pair point and a direction pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CrInput {
    pub size: usize,
    pub sample: u64,
    pub point: MatTuple,
    pub z1: MatTuple,
    pub z2: MatTuple,
}

/// Random Hermitian points and directions; sample `k` of size `n` uses
/// stream `(n, k)` under the master seed.
pub fn cr_samples(d: usize, sizes: &[usize], samples: usize, stream: RandomStream) -> Vec<CrInput> {
    let mut out = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        for k in 0..samples {
            let s = stream.sample(n as u32, k as u32);
            let mut rng = s.rng();
            out.push(CrInput {
                size: n,
                sample: (si * samples + k) as u64,
                point: herm_tuple(&mut rng, 2 * d, n),
                z1: herm_tuple(&mut rng, d, n),
                z2: herm_tuple(&mut rng, d, n),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrReport {
    pub reports: Vec<CheckReport>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Checks the nc Cauchy–Riemann equations at every input. The pass bound is
/// `tols.cr_algebraic` on the algebraic route and `tols.fd` otherwise.
pub fn cr_check(
    u: &dyn NcMap,
    v: &dyn NcMap,
    inputs: &[CrInput],
    route: &DerivRoute,
    seed: u64,
    tols: &Tolerances,
) -> Result<CrReport> {
    let tol = match route {
        DerivRoute::Algebraic(_) => tols.cr_algebraic,
        DerivRoute::FiniteDifference(_) => tols.fd,
    };
    let mut reports = Vec::with_capacity(inputs.len());
    for inp in inputs {
        let residual = cr_residual(u, v, route, &inp.point, &inp.z1, &inp.z2)?;
        let (a, b) = inp.point.split_pair()?;
        reports.push(
            CheckReport::graded("cr", residual, tol, tols.fail_threshold)
                .with_seed(seed, inp.sample)
                .with_witness(json!({
                    "size": inp.size,
                    "point": herm_point_to_value(&a, &b),
                    "Z1": tuple_to_value(&inp.z1),
                    "Z2": tuple_to_value(&inp.z2),
                }))
                .note(format!("route: {}", route.name())),
        );
    }
    sort_reports(&mut reports);
    let max_residual = reports.iter().map(|r| r.residual).fold(0.0, f64::max);
    let verdict = if reports.iter().any(CheckReport::failed) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict == Verdict::Gray) {
        Verdict::Gray
    } else {
        Verdict::Pass
    };
    Ok(CrReport {
        reports,
        max_residual,
        tolerance: tol,
        verdict,
    })
}

/// Re/Im of the block derivative `Df(A+iB)(Z₁+iZ₂)` against finite-difference
/// `Du`, `Dv`. The algebraic Cauchy–Riemann residual is recorded as the
/// metric `cr_algebraic` and must also pass.
pub fn du_dv_consistency(
    dec: &Decomposition,
    ab: &MatTuple,
    z1: &MatTuple,
    z2: &MatTuple,
    sched: &StepSchedule,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let alg = DerivRoute::Algebraic(dec.f.clone());
    let fd = DerivRoute::FiniteDifference(sched.clone());
    let (re, im) = du_dv(dec.u.as_ref(), dec.v.as_ref(), &alg, ab, z1, z2)?;
    let (du, dv) = du_dv(dec.u.as_ref(), dec.v.as_ref(), &fd, ab, z1, z2)?;
    let residual = (&re - &du).frobenius_norm().max((&im - &dv).frobenius_norm());
    let cr_alg = cr_residual(dec.u.as_ref(), dec.v.as_ref(), &alg, ab, z1, z2)?;
    let (a, b) = ab.split_pair()?;
    let mut rep = CheckReport::graded("du_dv_consistency", residual, tols.fd, tols.fail_threshold)
        .with_witness(json!({
            "f": dec.f.text(),
            "point": herm_point_to_value(&a, &b),
            "Z1": tuple_to_value(z1),
            "Z2": tuple_to_value(z2),
        }))
        .metric("cr_algebraic", cr_alg);
    if cr_alg > tols.cr_algebraic {
        rep = rep.fail_because("algebraic Cauchy-Riemann residual above tolerance");
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::super::{decompose, reconstruct};
    use super::*;
    use crate::ncexpr::VarKind;

    fn rp(text: &str) -> Arc<dyn NcMap> {
        Arc::new(NcFunction::parse(text, VarKind::RealPairs(1)).unwrap())
    }

    #[test]
    fn square_satisfies_cr_both_routes() {
        let tols = Tolerances::default();
        let f = NcFunction::parse("X1*X1", VarKind::ComplexVars(1)).unwrap();
        let dec = decompose(&f).unwrap();
        let inputs = cr_samples(1, &[2, 3], 5, RandomStream::new(7));
        let fd = cr_check(
            dec.u.as_ref(),
            dec.v.as_ref(),
            &inputs,
            &DerivRoute::FiniteDifference(StepSchedule::default()),
            7,
            &tols,
        )
        .unwrap();
        assert_eq!(fd.verdict, Verdict::Pass);
        assert!(fd.max_residual <= 1e-7, "{}", fd.max_residual);
        let alg = cr_check(
            dec.u.as_ref(),
            dec.v.as_ref(),
            &inputs,
            &DerivRoute::Algebraic(dec.f.clone()),
            7,
            &tols,
        )
        .unwrap();
        assert!(alg.max_residual <= 1e-12);
    }

    #[test]
    fn identity_pair_and_violating_pair() {
        let tols = Tolerances::default();
        let route = DerivRoute::FiniteDifference(StepSchedule::default());
        let inputs = cr_samples(1, &[2], 5, RandomStream::new(8));
        let ok = cr_check(rp("A1").as_ref(), rp("B1").as_ref(), &inputs, &route, 8, &tols).unwrap();
        assert!(ok.max_residual < 1e-9);
        let bad = cr_check(rp("A1 A1").as_ref(), rp("0").as_ref(), &inputs, &route, 8, &tols).unwrap();
        assert_eq!(bad.verdict, Verdict::Fail);
        // Du(Z₁,Z₂) = AZ₁ + Z₁A against 0
        let inp = &inputs[0];
        let (a, z1) = (inp.point.get(0), inp.z1.get(0));
        let want = (&(a * z1) + &(z1 * a)).frobenius_norm();
        assert!((bad.reports[0].residual - want).abs() <= 1e-7 * want.max(1.0));
        let _ = reconstruct(rp("A1 A1"), rp("0")).unwrap();
    }

    #[test]
    fn derivative_parts_match() {
        let tols = Tolerances::default();
        for text in ["X1*X1", "X1", "1i X1", "X1 X1 X1"] {
            let dec = decompose(&NcFunction::parse(text, VarKind::ComplexVars(1)).unwrap()).unwrap();
            let inp = &cr_samples(1, &[3], 1, RandomStream::new(9))[0];
            let rep = du_dv_consistency(&dec, &inp.point, &inp.z1, &inp.z2, &StepSchedule::default(), &tols).unwrap();
            assert!(rep.passed(), "{text}: {rep:?}");
            assert!(rep.metrics["cr_algebraic"] <= 1e-9);
        }
    }
}
