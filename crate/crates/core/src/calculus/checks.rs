use serde_json::json;

use super::{g_derivative_algebraic, g_derivative_fd, StepSchedule};
use crate::error::{NcError, Result};
use crate::matcore::interchange::tuple_to_value;
use crate::matcore::random::{gaussian_tuple, herm_tuple};
use crate::matcore::{block2_assemble, op_norm, CMat, MatTuple, RandomStream};
use crate::ncexpr::{NcMap, Space};
use crate::report::{CheckReport, Tolerances, Verdict};

/// Medians below this (relative to `max(1, ‖w(X)‖)`) count as converged
/// when judging monotone decay.
const MEDIAN_FLOOR: f64 = 1e-9;
/// Allowed growth between consecutive medians.
const DECAY_SLACK: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FdiffOptions {
    pub n_dirs: usize,
    /// Direction norms, largest first.
    pub magnitudes: Vec<f64>,
    pub schedule: StepSchedule,
}

impl Default for FdiffOptions {
    fn default() -> Self {
        FdiffOptions {
            n_dirs: 20,
            magnitudes: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            schedule: StepSchedule::default(),
        }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Directional derivative by the block formula when `w` is a polynomial
/// over complex points, by finite differences otherwise.
fn derivative(w: &dyn NcMap, x: &MatTuple, z: &MatTuple, sched: &StepSchedule) -> Result<(CMat, &'static str)> {
    let algebraic = w.space() == Space::Complex && w.as_nc_function().is_some_and(|f| f.is_polynomial());
    let res = if algebraic {
        g_derivative_algebraic(w, x, z).map(|r| (r.value, "algebraic"))
    } else {
        g_derivative_fd(w, x, z, sched).map(|r| (r.value, "fd"))
    };
    res.map_err(|e| NcError::DerivativeUnavailable(e.to_string()))
}

/// Fréchet residual `‖w(X+Z) − w(X) − Dw(X)(Z)‖ / ‖Z‖` over random
/// directions of shrinking size.
///
/// Passes when the per-magnitude medians do not grow by more than a factor
/// two from one magnitude to the next (or sit below the rounding floor) and
/// the median at the smallest magnitude is at most `tols.fdiff_final`.
pub fn f_diff_check(
    w: &dyn NcMap,
    x: &MatTuple,
    stream: RandomStream,
    opts: &FdiffOptions,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let wx = w.eval(x)?;
    let scale = op_norm(&wx).max(1.0);
    let mut rng = stream.rng();
    let (d, n) = (x.arity(), x.dim());
    let mut per_mag: Vec<Vec<f64>> = vec![Vec::new(); opts.magnitudes.len()];
    let mut route = "";
    for _ in 0..opts.n_dirs {
        let raw = match w.space() {
            Space::Hermitian => herm_tuple(&mut rng, d, n),
            Space::Complex => gaussian_tuple(&mut rng, d, n, n),
        };
        let unit = raw.scale_re(1.0 / raw.norm());
        let (dw, r) = derivative(w, x, &unit, &opts.schedule)?;
        route = r;
        for (slot, &m) in per_mag.iter_mut().zip(&opts.magnitudes) {
            // Points that leave the domain at this size are not counted.
            if let Ok(wz) = w.eval(&x.axpy(m, &unit)?) {
                let rem = &(&wz - &wx) - &dw.scale_re(m);
                slot.push(op_norm(&rem) / m);
            }
        }
    }
    let mut medians = Vec::new();
    let mut report_metrics = Vec::new();
    for (slot, &m) in per_mag.iter_mut().zip(&opts.magnitudes) {
        if slot.is_empty() {
            continue;
        }
        let med = median(slot);
        medians.push(med);
        report_metrics.push((format!("median@{m:e}"), med));
    }
    let Some(&last) = medians.last() else {
        return Err(NcError::DerivativeUnavailable(
            "no magnitude stayed inside the domain".into(),
        ));
    };
    let floor = MEDIAN_FLOOR * scale;
    let monotone = medians.windows(2).all(|p| p[1] <= DECAY_SLACK * p[0] || p[1] <= floor);
    let mut rep = CheckReport::graded("fdiff", last, tols.fdiff_final, tols.fail_threshold)
        .with_seed(stream.master_seed, stream.index)
        .with_witness(json!({ "X": tuple_to_value(x), "n_dirs": opts.n_dirs, "magnitudes": opts.magnitudes }))
        .note(format!("derivative route: {route}"))
        .note("rule: medians nonincreasing within factor 2, final median <= tolerance");
    for (k, v) in report_metrics {
        rep = rep.metric(&k, v);
    }
    if !monotone {
        rep = rep.fail_because("remainder medians do not decay");
    } else if rep.verdict == Verdict::Gray {
        rep.verdict = Verdict::Fail;
    }
    Ok(rep)
}

/// `Dw(X⊕X)([[0,Z],[Z,0]])` against `[[0,R],[R,0]]` with `R = Dw(X)(Z)`,
/// both by finite differences.
pub fn block_derivative_check(
    w: &dyn NcMap,
    x: &MatTuple,
    z: &MatTuple,
    sched: &StepSchedule,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let n = x.dim();
    let zero = CMat::zeros(n, n);
    let xx = MatTuple::new(x.iter().map(|a| a.direct_sum(a)).collect())?;
    let zz = MatTuple::new(
        z.iter()
            .map(|c| block2_assemble(&zero, c, c, &zero))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let left = g_derivative_fd(w, &xx, &zz, sched)?;
    let right = g_derivative_fd(w, x, z, sched)?;
    let expected = block2_assemble(&zero, &right.value, &right.value, &zero)?;
    let residual = (&left.value - &expected).frobenius_norm();
    Ok(
        CheckReport::graded("block_derivative", residual, tols.block_derivative, tols.fail_threshold)
            .with_witness(json!({ "X": tuple_to_value(x), "Z": tuple_to_value(z) }))
            .metric("fd_residual_left", left.cross_check_residual)
            .metric("fd_residual_right", right.cross_check_residual),
    )
}
