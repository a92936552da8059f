//! Hermitian spectral primitives: cyclic Jacobi eigensolver, PSD square
//! root, polar decomposition, operator norm, and the defect/rotation
//! construction for contractions.

use num_complex::Complex64;

use super::cmat::{CMat, ZERO};
use super::tuple::block2_assemble;
use crate::error::{NcError, Result};

/// Relative Hermitian tolerance `‖M − M*‖ ≤ tol·max(1, ‖M‖)`.
pub const HERM_TOL: f64 = 1e-12;
/// Negative eigenvalues down to `−PSD_CLAMP·‖P‖` are treated as zero.
pub const PSD_CLAMP: f64 = 1e-10;
/// Smallest admissible `σ_min/σ_max` for the polar decomposition.
pub const SINGULAR_TOL: f64 = 1e-10;
pub const CONTRACTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigOptions {
    /// Stop once the off-diagonal Frobenius norm is below `off_tol·‖H‖_F`.
    pub off_tol: f64,
    pub max_sweeps: usize,
    pub herm_tol: f64,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            off_tol: 1e-13,
            max_sweeps: 100,
            herm_tol: HERM_TOL,
        }
    }
}

/// Eigenvalues in ascending order with the unitary whose columns are the
/// corresponding eigenvectors: `H = U·diag(λ)·U*`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermEig {
    /// `U·diag(g(λ))·U*`.
    pub fn apply(&self, g: impl Fn(f64) -> f64) -> CMat {
        let u = &self.vectors;
        let n = u.rows();
        let gl: Vec<f64> = self.values.iter().map(|&l| g(l)).collect();
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for (k, &g) in gl.iter().enumerate() {
                    if g != 0.0 {
                        acc += u[(i, k)] * u[(j, k)].conj() * g;
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out.hermitian_part()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn herm_eig(h: &CMat) -> Result<HermEig> {
    herm_eig_with(h, &EigOptions::default())
}

/// Cyclic complex Jacobi.
pub fn herm_eig_with(h: &CMat, opts: &EigOptions) -> Result<HermEig> {
    if !h.is_square() {
        return Err(NcError::DimensionMismatch("eigenproblem of a non-square matrix".into()));
    }
    let dev = h.hermitian_deviation();
    if dev > opts.herm_tol * h.frobenius_norm().max(1.0) {
        return Err(NcError::NotHermitian { deviation: dev });
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = CMat::identity(n);
    let scale = a.frobenius_norm();
    let target = opts.off_tol * scale;

    let off_norm = |a: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    // a zero matrix is already diagonal
    while scale > 0.0 && off_norm(&a) > target {
        if sweeps == opts.max_sweeps {
            return Err(NcError::NoConvergence {
                sweeps,
                off: off_norm(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

/// One Jacobi rotation zeroing `a[p][q]`: a phase on column `q` makes the
/// entry real, then a real plane rotation annihilates it.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    let (jpp, jpq, jqp, jqq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0), pc * (-s), pc * c);
    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * jpp + vkq * jqp;
        v[(k, q)] = vkp * jpq + vkq * jqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues within `PSD_CLAMP·‖P‖` below zero, and eigenvalues at the
/// rounding level of `‖P‖`, are set to zero before taking roots.
pub fn sqrt_psd(p: &CMat) -> Result<CMat> {
    sqrt_psd_scaled(p, 0.0)
}

/// As [`sqrt_psd`], measuring the clamp thresholds against
/// `max(‖P‖, reference)`; `I − T*T` has reference scale 1 even when it is
/// itself tiny.
pub fn sqrt_psd_scaled(p: &CMat, reference: f64) -> Result<CMat> {
    let eig = herm_eig(p)?;
    let norm = eig.values.iter().fold(reference, |m, l| m.max(l.abs()));
    let min = eig.min();
    if min < -PSD_CLAMP * norm {
        return Err(NcError::NotPsd { min_eig: min });
    }
    let dust = 8.0 * (p.rows() as f64) * f64::EPSILON * norm;
    Ok(eig.apply(|l| if l <= dust { 0.0 } else { l.sqrt() }))
}

/// Largest singular value, from the top eigenvalue of `Z*Z` (or `ZZ*`).
pub fn op_norm(z: &CMat) -> f64 {
    if z.rows() == 0 || z.cols() == 0 {
        return 0.0;
    }
    let gram = if z.cols() <= z.rows() {
        &z.adjoint() * z
    } else {
        z * &z.adjoint()
    };
    match herm_eig(&gram) {
        Ok(eig) => eig.max().max(0.0).sqrt(),
        // The Gram matrix is Hermitian by construction and Jacobi converges
        // quadratically; Frobenius is the nearest upper bound if it ever fails.
        Err(_) => z.frobenius_norm(),
    }
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(z: &CMat) -> Result<f64> {
    let eig = herm_eig(&(&z.adjoint() * z))?;
    Ok(eig.min().max(0.0).sqrt())
}

/// `S = U·P` with `U` unitary and `P` positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub unitary: CMat,
    pub positive: CMat,
}

pub fn polar(s: &CMat) -> Result<Polar> {
    if !s.is_square() {
        return Err(NcError::DimensionMismatch(
            "polar decomposition of a non-square matrix".into(),
        ));
    }
    let eig = herm_eig(&(&s.adjoint() * s))?;
    let smax = eig.max().max(0.0).sqrt();
    let smin = eig.min().max(0.0).sqrt();
    if smax == 0.0 || smin <= SINGULAR_TOL * smax {
        return Err(NcError::Singular(format!("σ_min = {smin:e}, σ_max = {smax:e}")));
    }
    let positive = eig.apply(f64::sqrt);
    let inv_sqrt = eig.apply(|l| 1.0 / l.sqrt());
    Ok(Polar {
        unitary: s * &inv_sqrt,
        positive,
    })
}

/// Defect matrices of a contraction and its unitary rotation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectRotation {
    /// The contraction actually used (normalized when requested).
    pub t: CMat,
    /// Factor the input was divided by (1 without normalization).
    pub scale: f64,
    /// `(I − T*T)^{1/2}`, size `m`.
    pub d_t: CMat,
    /// `(I − TT*)^{1/2}`, size `n`.
    pub d_t_star: CMat,
    /// `[[T, D_{T*}], [D_T, −T*]]`.
    pub u_t: CMat,
}

pub fn defect_rotation(t: &CMat, normalize: bool) -> Result<DefectRotation> {
    let norm = op_norm(t);
    let (t, scale) = if normalize {
        if norm == 0.0 {
            return Err(NcError::ZeroMatrix);
        }
        (t.scale_re(1.0 / norm), norm)
    } else {
        if norm > 1.0 + CONTRACTION_SLACK {
            return Err(NcError::NotContraction { norm });
        }
        (t.clone(), 1.0)
    };
    let (n, m) = t.shape();
    let t_adj = t.adjoint();
    let d_t = sqrt_psd_scaled(&(&CMat::identity(m) - &(&t_adj * &t)), 1.0)?;
    let d_t_star = sqrt_psd_scaled(&(&CMat::identity(n) - &(&t * &t_adj)), 1.0)?;
    let u_t = block2_assemble(&t, &d_t_star, &d_t, &-&t_adj)?;
    Ok(DefectRotation {
        t,
        scale,
        d_t,
        d_t_star,
        u_t,
    })
}

/// `‖U*U − I‖_F`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    (&(&u.adjoint() * u) - &CMat::identity(u.cols())).frobenius_norm()
}

/// Condition number `‖S‖·‖S⁻¹‖` in the operator norm.
pub fn condition_number(s: &CMat) -> Result<f64> {
    let inv = s.inverse()?;
    Ok(op_norm(s) * op_norm(&inv))
}

#[cfg(test)]
mod tests {
    use super::super::cmat::pauli::*;
    use super::super::cmat::I;
    use super::*;

    fn diag_residual(h: &CMat, e: &HermEig) -> f64 {
        let d = CMat::from_real_diag(&e.values);
        (&(&(&e.vectors.adjoint() * h) * &e.vectors) - &d).frobenius_norm()
    }

    #[test]
    fn eig_of_pauli_matrices() {
        for h in [sigma_z(), sigma_x(), sigma_y()] {
            let e = herm_eig(&h).unwrap();
            assert!((e.values[0] + 1.0).abs() < 1e-14);
            assert!((e.values[1] - 1.0).abs() < 1e-14);
            assert!(diag_residual(&h, &e) < 1e-13);
            assert!(unitarity_residual(&e.vectors) < 1e-13);
        }
    }

    #[test]
    fn eig_of_scalar_matrix() {
        let h = CMat::scalar(3, Complex64::new(2.5, 0.0));
        let e = herm_eig(&h).unwrap();
        assert_eq!(e.values, vec![2.5; 3]);
        assert_eq!(e.vectors, CMat::identity(3));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let x = CMat::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(herm_eig(&x), Err(NcError::NotHermitian { .. })));
    }

    #[test]
    fn eig_reports_no_convergence() {
        let h = &sigma_x() + &sigma_y();
        let opts = EigOptions {
            max_sweeps: 0,
            ..EigOptions::default()
        };
        assert!(matches!(herm_eig_with(&h, &opts), Err(NcError::NoConvergence { .. })));
    }

    #[test]
    fn sqrt_examples() {
        let r = sqrt_psd(&CMat::scalar(2, Complex64::new(4.0, 0.0))).unwrap();
        assert!((&r - &CMat::scalar(2, Complex64::new(2.0, 0.0))).frobenius_norm() < 1e-14);
        assert_eq!(sqrt_psd(&CMat::zeros(3, 3)).unwrap(), CMat::zeros(3, 3));
        let p = &sigma_x() + &CMat::identity(2);
        let r = sqrt_psd(&p).unwrap();
        assert!((&(&r * &r) - &p).frobenius_norm() < 1e-14);
        // σx + I has eigenvalues 0 and 2, so the root is (σx + I)/√2.
        let expected = p.scale_re(1.0 / 2f64.sqrt());
        assert!((&r - &expected).frobenius_norm() < 1e-14);
        assert!(matches!(sqrt_psd(&sigma_z()), Err(NcError::NotPsd { .. })));
    }

    #[test]
    fn polar_examples() {
        let d = CMat::from_real_diag(&[2.0, 3.0]);
        let pd = polar(&d).unwrap();
        assert!((&pd.unitary - &CMat::identity(2)).frobenius_norm() < 1e-14);
        assert!((&pd.positive - &d).frobenius_norm() < 1e-14);

        let pd = polar(&sigma_x().scale_re(2.0)).unwrap();
        assert!((&pd.unitary - &sigma_x()).frobenius_norm() < 1e-14);
        assert!((&pd.positive - &CMat::scalar(2, Complex64::new(2.0, 0.0))).frobenius_norm() < 1e-14);

        let u0 = sigma_y();
        let pd = polar(&u0).unwrap();
        assert!((&pd.unitary - &u0).frobenius_norm() < 1e-14);

        let sing = CMat::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(polar(&sing), Err(NcError::Singular(_))));
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&CMat::identity(3)) - 1.0).abs() < 1e-15);
        let n = CMat::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]);
        assert!((op_norm(&n) - 2.0).abs() < 1e-14);
        let z = &sigma_x() + &sigma_y().scale(I);
        assert_eq!(z, n);
        assert!((op_norm(&z) - 2.0).abs() < 1e-14);
        let rect = CMat::from_real_rows(&[vec![3.0], vec![4.0]]);
        assert!((op_norm(&rect) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn defect_rotation_examples() {
        let zero = CMat::zeros(2, 2);
        let r = defect_rotation(&zero, false).unwrap();
        assert!((&r.d_t - &CMat::identity(2)).frobenius_norm() < 1e-15);
        let swap = block2_assemble(&zero, &CMat::identity(2), &CMat::identity(2), &zero).unwrap();
        assert!((&r.u_t - &swap).frobenius_norm() < 1e-15);
        assert_eq!(defect_rotation(&zero, true), Err(NcError::ZeroMatrix));

        let r = defect_rotation(&CMat::identity(2), false).unwrap();
        assert!(r.d_t.frobenius_norm() < 1e-15);
        let refl = CMat::from_real_diag(&[1.0, 1.0, -1.0, -1.0]);
        assert!((&r.u_t - &refl).frobenius_norm() < 1e-15);

        let r = defect_rotation(&sigma_x().scale_re(0.5), false).unwrap();
        assert!(unitarity_residual(&r.u_t) < 1e-10);

        assert!(matches!(
            defect_rotation(&sigma_x().scale_re(2.0), false),
            Err(NcError::NotContraction { .. })
        ));
        let r = defect_rotation(&sigma_x().scale_re(2.0), true).unwrap();
        assert!((r.scale - 2.0).abs() < 1e-14);
        assert!(unitarity_residual(&r.u_t) < 1e-12);
    }

    #[test]
    fn rectangular_defect_rotation_is_unitary() {
        let t = CMat::from_rows(&[
            vec![Complex64::new(0.3, 0.1)],
            vec![Complex64::new(-0.2, 0.4)],
            vec![Complex64::new(0.5, 0.0)],
        ]);
        let r = defect_rotation(&t, true).unwrap();
        assert_eq!(r.u_t.shape(), (4, 4));
        assert!(unitarity_residual(&r.u_t) < 1e-12);
    }
}
