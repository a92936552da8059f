use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::laws::{conjugate, require_intertwiner};
use crate::error::{NcError, Result};
use crate::matcore::interchange::{mat_to_value, tuple_to_value};
use crate::matcore::random::{herm_commuting_with, unitary};
use crate::matcore::{defect_rotation, herm_eig, op_norm, unitarity_residual, CMat, MatTuple, RandomStream};
use crate::ncexpr::{NcMap, Space};
use crate::report::{CheckReport, Tolerances, Verdict};

const STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// The four verifiable steps of the rotation argument: from `XT = TY` to
/// `U_T*(X⊕Y)U_T = Y⊕X`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntertwiningTrace {
    pub steps: Vec<TraceStep>,
    /// `‖T‖` before normalization.
    pub scale: f64,
}

impl IntertwiningTrace {
    pub fn ok(&self) -> bool {
        self.steps.iter().all(|s| s.ok)
    }

    pub fn max_residual(&self) -> f64 {
        self.steps.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    pub fn to_report(&self, tols: &Tolerances) -> CheckReport {
        let mut rep = CheckReport::graded("intertwining_trace", self.max_residual(), STEP_TOL, tols.fail_threshold)
            .metric("t_norm", self.scale);
        for s in &self.steps {
            rep = rep.metric(&s.name, s.residual);
        }
        if !self.ok() && rep.verdict != Verdict::Fail {
            rep = rep.fail_because("a construction step exceeded its tolerance");
        }
        rep
    }
}

fn step(name: &str, residual: f64, tolerance: f64) -> TraceStep {
    TraceStep {
        name: name.to_string(),
        residual,
        tolerance,
        ok: residual <= tolerance,
    }
}

fn commutation(a: &CMat, b: &CMat) -> f64 {
    (&(a * b) - &(b * a)).frobenius_norm()
}

pub fn intertwining_construction_trace(x: &MatTuple, y: &MatTuple, t: &CMat) -> Result<IntertwiningTrace> {
    require_intertwiner(x, y, t)?;
    let rot = defect_rotation(t, true)?;
    let scale = (x.norm() + y.norm()).max(1.0);
    let normalized = (op_norm(&rot.t) - 1.0).abs();
    let mut defect: f64 = 0.0;
    for (xk, yk) in x.iter().zip(y.iter()) {
        defect = defect
            .max(commutation(xk, &rot.d_t_star))
            .max(commutation(yk, &rot.d_t));
    }
    let u = &rot.u_t;
    let mut conj: f64 = 0.0;
    for (xk, yk) in x.iter().zip(y.iter()) {
        let lhs = &(&u.adjoint() * &xk.direct_sum(yk)) * u;
        conj = conj.max((&lhs - &yk.direct_sum(xk)).frobenius_norm());
    }
    Ok(IntertwiningTrace {
        steps: vec![
            step("normalize", normalized, STEP_TOL),
            step("defect_commutation", defect, STEP_TOL * scale),
            step("unitary", unitarity_residual(u), STEP_TOL),
            step("conjugation", conj, STEP_TOL * scale),
        ],
        scale: rot.scale,
    })
}

/// Hermitian `X` (size `n`), `Y` (size `m`) and a nonzero `T` with
/// `X_k T = T Y_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntertwinerPair {
    pub x: MatTuple,
    pub y: MatTuple,
    pub t: CMat,
}

/// `X_k = UΛ_kU*`, `Y_k = VM_kV*`, `T = UΣV*`, where `Λ_k` and `M_k` agree on
/// the first `overlap` diagonal slots and `Σ` is supported there. The largest
/// singular value of `T/‖T‖` is 1 and the others lie in `[0.2, 0.8]`, so the
/// defects stay away from their square-root branch point. Components commute
/// within each tuple.
pub fn intertwiner_pair_gen(
    n: usize,
    m: usize,
    overlap: usize,
    d: usize,
    stream: RandomStream,
) -> Result<IntertwinerPair> {
    if n == 0 || m == 0 || d == 0 || overlap == 0 || overlap > n.min(m) {
        return Err(NcError::DimensionMismatch(format!(
            "need 1 <= overlap <= min(n, m), got n={n}, m={m}, overlap={overlap}, d={d}"
        )));
    }
    let mut rng = stream.rng();
    let u = unitary(&mut rng, n);
    let v = unitary(&mut rng, m);
    let mut xs = Vec::with_capacity(d);
    let mut ys = Vec::with_capacity(d);
    for _ in 0..d {
        let shared: Vec<f64> = (0..overlap).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut lam = shared.clone();
        lam.extend((overlap..n).map(|_| rng.random_range(1.5..3.0)));
        let mut mu = shared;
        mu.extend((overlap..m).map(|_| rng.random_range(-3.0..-1.5)));
        xs.push((&(&u * &CMat::from_real_diag(&lam)) * &u.adjoint()).hermitian_part());
        ys.push((&(&v * &CMat::from_real_diag(&mu)) * &v.adjoint()).hermitian_part());
    }
    let overall = rng.random_range(0.5..2.0);
    let mut sigma = CMat::zeros(n, m);
    for i in 0..overlap {
        let s = if i == 0 { 1.0 } else { rng.random_range(0.2..0.8) };
        sigma[(i, i)] = Complex64::new(overall * s, 0.0);
    }
    Ok(IntertwinerPair {
        x: MatTuple::new(xs)?,
        y: MatTuple::new(ys)?,
        t: &(&u * &sigma) * &v.adjoint(),
    })
}

/// Unitary times a positive matrix commuting with `X`, so that `SXS⁻¹` is
/// again Hermitian. For `d > 1` the positive factor is a scalar.
pub(crate) fn hermitian_preserving_similarity<R: Rng + ?Sized>(rng: &mut R, x: &MatTuple) -> Result<(CMat, CMat)> {
    let n = x.dim();
    let p = if x.arity() == 1 {
        let h = herm_commuting_with(rng, x.get(0))?;
        let eig = herm_eig(&h)?;
        let shift = 0.5 * (eig.max() - eig.min()).max(1.0) - eig.min();
        &h + &CMat::identity(n).scale_re(shift)
    } else {
        CMat::identity(n).scale_re(rng.random_range(0.5..2.0))
    };
    Ok((unitary(rng, n), p))
}

/// A real nc function extended by `w(SXS⁻¹) = S·w(X)·S⁻¹` must agree with
/// itself whenever `SXS⁻¹` is Hermitian. Checks this at `S = UP`, both
/// directly and through the polar factors (`P` must commute with `w(X)`).
pub fn real_to_nc_check(w: &dyn NcMap, x: &MatTuple, stream: RandomStream, tols: &Tolerances) -> Result<CheckReport> {
    if w.space() != Space::Hermitian {
        return Err(NcError::KindMismatch(
            "real similarity check needs a map on Hermitian tuples".into(),
        ));
    }
    let mut rng = stream.rng();
    let (u, p) = hermitian_preserving_similarity(&mut rng, x)?;
    let s = &u * &p;
    let s_inv = s.inverse()?;
    let cond = op_norm(&s) * op_norm(&s_inv);
    let raw_y = x.map(|m| &(&s * m) * &s_inv);
    let y = conjugate(w, x, &s, &s_inv)?;
    let wx = w.eval(x)?;
    let wy = w.eval(&y)?;
    let direct = (&wy - &(&(&s * &wx) * &s_inv)).frobenius_norm();
    let p_inv = p.inverse()?;
    let polar = (&(&(&p * &wx) * &p_inv) - &wx).frobenius_norm();
    let norm = cond.max(1.0);
    let residual = (direct / norm).max(polar / norm);
    Ok(
        CheckReport::graded("real_similarity", residual, tols.real_similarity, tols.fail_threshold)
            .with_seed(stream.master_seed, stream.index)
            .with_witness(json!({ "X": tuple_to_value(x), "U": mat_to_value(&u), "P": mat_to_value(&p) }))
            .metric("cond", cond)
            .metric("direct_residual", direct)
            .metric("polar_residual", polar)
            .metric("conjugate_hermitian_deviation", raw_y.hermitian_deviation()),
    )
}

/// `w(Y⊕X)` against `U_T*·w(X⊕Y)·U_T`: the unitary-equivalence step of the
/// rotation argument applied to a concrete `w`.
pub fn rotation_equivalence_residual(w: &dyn NcMap, x: &MatTuple, y: &MatTuple, t: &CMat) -> Result<f64> {
    require_intertwiner(x, y, t)?;
    let rot = defect_rotation(t, true)?;
    let xy = crate::matcore::direct_sum(x, y)?;
    let yx = crate::matcore::direct_sum(y, x)?;
    let lhs = w.eval(&yx)?;
    let rhs = &(&rot.u_t.adjoint() * &w.eval(&xy)?) * &rot.u_t;
    Ok((&lhs - &rhs).frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::super::laws::{check_intertwining, intertwining_defect};
    use super::*;
    use crate::matcore::pauli::*;
    use crate::matcore::random::herm_tuple;
    use crate::ncexpr::{NcFunction, VarKind};

    fn real(text: &str) -> NcFunction {
        NcFunction::parse(text, VarKind::ComplexVars(1))
            .unwrap()
            .restricted_to_hermitian()
    }

    #[test]
    fn generated_pairs_intertwine() {
        for (n, m, overlap, d) in [(2, 2, 1, 1), (3, 2, 2, 1), (2, 4, 2, 2), (4, 4, 4, 1)] {
            let p = intertwiner_pair_gen(n, m, overlap, d, RandomStream::new(50).at(n as u64)).unwrap();
            assert!(intertwining_defect(&p.x, &p.y, &p.t).unwrap() < 1e-13);
            assert_eq!(p.t.shape(), (n, m));
            let trace = intertwining_construction_trace(&p.x, &p.y, &p.t).unwrap();
            assert!(trace.ok(), "{trace:?}");
            assert!(trace.max_residual() < 1e-12);
        }
        assert!(intertwiner_pair_gen(2, 2, 0, 1, RandomStream::new(1)).is_err());
        assert!(intertwiner_pair_gen(2, 3, 3, 1, RandomStream::new(1)).is_err());
    }

    #[test]
    fn trace_on_scalar_example() {
        // X = Y = σ_z, T = 2I
        let x = MatTuple::single(sigma_z());
        let trace = intertwining_construction_trace(&x, &x, &CMat::identity(2).scale_re(2.0)).unwrap();
        assert_eq!(trace.scale, 2.0);
        assert!(trace.ok());
        assert!(matches!(
            intertwining_construction_trace(&x, &x, &CMat::zeros(2, 2)),
            Err(NcError::ZeroMatrix)
        ));
    }

    #[test]
    fn real_functions_intertwine_and_rotate() {
        let tols = Tolerances::default();
        let p = intertwiner_pair_gen(3, 2, 2, 1, RandomStream::new(51)).unwrap();
        for text in ["X1 X1 X1", "sqrtm(X1 X1)"] {
            let w = real(text);
            assert!(
                check_intertwining(&w, &p.x, &p.y, &p.t, &tols).unwrap().passed(),
                "{text}"
            );
            assert!(rotation_equivalence_residual(&w, &p.x, &p.y, &p.t).unwrap() < 1e-9);
        }
    }

    #[test]
    fn real_similarity_passes_for_real_functions() {
        let tols = Tolerances::default();
        let mut rng = RandomStream::new(52).rng();
        for text in ["X1 X1 X1", "sqrtm(X1 X1)"] {
            let x = herm_tuple(&mut rng, 1, 4);
            let rep = real_to_nc_check(&real(text), &x, RandomStream::new(52).at(1), &tols).unwrap();
            assert!(rep.passed(), "{text}: {rep:?}");
            assert!(rep.metrics["conjugate_hermitian_deviation"] < 1e-10);
        }
        let complex = NcFunction::parse("X1", VarKind::ComplexVars(1)).unwrap();
        let x = herm_tuple(&mut rng, 1, 2);
        assert!(real_to_nc_check(&complex, &x, RandomStream::new(1), &tols).is_err());
    }
}
