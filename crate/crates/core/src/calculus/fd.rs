use serde::Serialize;

use super::{DerivMethod, DerivativeReport};
use crate::error::{NcError, Result};
use crate::matcore::{CMat, MatTuple};
use crate::ncexpr::NcMap;

/// Step sizes for central differences, largest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepSchedule {
    pub steps: Vec<f64>,
    /// Error order removed by one Richardson step; 0 disables extrapolation.
    pub richardson_order: u32,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule {
            steps: vec![1e-2, 1e-3, 1e-4, 1e-5],
            richardson_order: 2,
        }
    }
}

impl StepSchedule {
    pub fn new(steps: Vec<f64>, richardson_order: u32) -> Result<Self> {
        if steps.len() < 2 {
            return Err(NcError::Format("a step schedule needs at least two steps".into()));
        }
        if steps.iter().any(|h| !(h.is_finite() && *h > 0.0)) || steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(NcError::Format("steps must be positive and strictly decreasing".into()));
        }
        Ok(StepSchedule {
            steps,
            richardson_order,
        })
    }
}

fn out_of_domain(e: &NcError) -> bool {
    matches!(
        e,
        NcError::DomainViolation(_) | NcError::NotPsd { .. } | NcError::NotHermitian { .. }
    )
}

/// Central difference `(w(X+hZ) − w(X−hZ))/2h` over the schedule, followed
/// by one Richardson step between neighbouring steps. Returns the finest
/// extrapolant; the cross-check residual is its distance to the next one.
///
/// Steps where `X ± hZ` leaves the domain are dropped; fewer than two
/// usable steps is a domain error.
pub fn g_derivative_fd(w: &dyn NcMap, x: &MatTuple, z: &MatTuple, sched: &StepSchedule) -> Result<DerivativeReport> {
    if x.arity() != z.arity() || x.shape() != z.shape() {
        return Err(NcError::ShapeMismatch(format!(
            "point {:?} and direction {:?} differ",
            x.shape(),
            z.shape()
        )));
    }
    let mut used = Vec::new();
    let mut diffs: Vec<CMat> = Vec::new();
    let mut skipped = Vec::new();
    for &h in &sched.steps {
        let plus = w.eval(&x.axpy(h, z)?);
        let minus = w.eval(&x.axpy(-h, z)?);
        match (plus, minus) {
            (Ok(p), Ok(m)) => {
                used.push(h);
                diffs.push((&p - &m).scale_re(0.5 / h));
            }
            (Err(e), _) | (_, Err(e)) if out_of_domain(&e) => skipped.push(format!("h={h:e}: {e}")),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    if used.len() < 2 {
        return Err(NcError::DomainViolation(format!(
            "fewer than two usable steps ({})",
            skipped.join("; ")
        )));
    }
    let k = used.len();
    if sched.richardson_order == 0 {
        let value = diffs[k - 1].clone();
        let residual = (&value - &diffs[k - 2]).frobenius_norm();
        return Ok(DerivativeReport {
            value,
            method: DerivMethod::CentralDiff { steps: used },
            cross_check_residual: residual,
            consistent: true,
        });
    }
    let p = sched.richardson_order as i32;
    let extrapolants: Vec<CMat> = (0..k - 1)
        .map(|i| {
            let rho = used[i] / used[i + 1];
            let f = rho.powi(p);
            (&diffs[i + 1].scale_re(f) - &diffs[i]).scale_re(1.0 / (f - 1.0))
        })
        .collect();
    let value = extrapolants[k - 2].clone();
    // With a single extrapolant the comparison falls back to the raw finest difference.
    let reference = if k >= 3 { &extrapolants[k - 3] } else { &diffs[k - 1] };
    let residual = (&value - reference).frobenius_norm();
    Ok(DerivativeReport {
        value,
        method: DerivMethod::Richardson {
            steps: used,
            order: sched.richardson_order,
        },
        cross_check_residual: residual,
        consistent: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::g_derivative_algebraic;
    use crate::matcore::random::{gaussian_tuple, herm_tuple};
    use crate::matcore::RandomStream;
    use crate::ncexpr::{DomainGuard, NcFunction, VarKind};

    #[test]
    fn identity_echoes_direction() {
        let mut rng = RandomStream::new(1).rng();
        let x = gaussian_tuple(&mut rng, 1, 3, 3);
        let z = gaussian_tuple(&mut rng, 1, 3, 3);
        let f = NcFunction::parse("X1", VarKind::ComplexVars(1)).unwrap();
        let rep = g_derivative_fd(&f, &x, &z, &StepSchedule::default()).unwrap();
        assert!((&rep.value - z.get(0)).frobenius_norm() < 1e-10);
    }

    #[test]
    fn gram_root_near_identity_is_identity_map() {
        let mut rng = RandomStream::new(2).rng();
        let z = herm_tuple(&mut rng, 1, 3);
        let w2 = NcFunction::parse("sqrtm(X1' X1)", VarKind::ComplexVars(1)).unwrap();
        let x = MatTuple::single(CMat::identity(3));
        let rep = g_derivative_fd(&w2, &x, &z, &StepSchedule::default()).unwrap();
        assert!((&rep.value - z.get(0)).frobenius_norm() < 1e-8);
    }

    #[test]
    fn agrees_with_block_route_on_square() {
        let mut rng = RandomStream::new(3).rng();
        let x = gaussian_tuple(&mut rng, 1, 4, 4);
        let z = gaussian_tuple(&mut rng, 1, 4, 4);
        let f = NcFunction::parse("X1*X1", VarKind::ComplexVars(1)).unwrap();
        let fd = g_derivative_fd(&f, &x, &z, &StepSchedule::default()).unwrap();
        let alg = g_derivative_algebraic(&f, &x, &z).unwrap();
        assert!((&fd.value - &alg.value).frobenius_norm() <= 1e-6 * alg.value.frobenius_norm());
    }

    #[test]
    fn shrinks_schedule_at_domain_boundary() {
        let f = NcFunction::parse("X1", VarKind::ComplexVars(1))
            .unwrap()
            .with_guard(DomainGuard::NormLt(1.005));
        let x = MatTuple::single(CMat::identity(2));
        let z = MatTuple::single(CMat::identity(2));
        let rep = g_derivative_fd(&f, &x, &z, &StepSchedule::default()).unwrap();
        match rep.method {
            DerivMethod::Richardson { steps, .. } => assert_eq!(steps, vec![1e-3, 1e-4, 1e-5]),
            other => panic!("unexpected method {other:?}"),
        }
        let tight = f.with_guard(DomainGuard::NormLt(1.00005));
        assert!(matches!(
            g_derivative_fd(&tight, &x, &z, &StepSchedule::default()),
            Err(NcError::DomainViolation(_))
        ));
    }

    #[test]
    fn schedule_validation() {
        assert!(StepSchedule::new(vec![1e-2], 2).is_err());
        assert!(StepSchedule::new(vec![1e-3, 1e-2], 2).is_err());
        assert!(StepSchedule::new(vec![1e-2, 1e-3], 2).is_ok());
    }
}
