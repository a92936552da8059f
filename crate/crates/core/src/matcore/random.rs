//! Seeded random matrix generators.
//!
//! Sample `k` of the stream `(seed, ·)` is a pure function of `(seed, k)`:
//! each index selects an independent ChaCha20 stream under the master seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cmat::{CMat, ZERO};
use super::spectral::{min_singular_value, op_norm};
use super::tuple::MatTuple;
use crate::error::{NcError, Result};

pub type SampleRng = ChaCha20Rng;

pub const MAX_ATTEMPTS: usize = 100;
pub const MIN_INVERTIBLE_SIGMA: f64 = 0.05;
pub const CONTRACTION_NORM: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    pub master_seed: u64,
    pub index: u64,
}

impl RandomStream {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed, index: 0 }
    }

    pub fn at(self, index: u64) -> Self {
        Self { index, ..self }
    }

    /// Derived stream for a named sub-task; `(tag, sample)` packed into one index.
    pub fn sample(self, tag: u32, sample: u32) -> Self {
        self.at(((tag as u64) << 32) | sample as u64)
    }

    pub fn rng(&self) -> SampleRng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.index);
        rng
    }
}

/// Kinds of random matrix the harness draws.
#[derive(Debug, Clone, PartialEq)]
pub enum RandomKind {
    Herm,
    Unitary,
    Invertible,
    Contraction,
    HermCommutingWith(CMat),
}

/// Draws one matrix of the given kind from sample `stream.index`.
pub fn random_gen(kind: &RandomKind, n: usize, stream: RandomStream) -> Result<CMat> {
    let mut rng = stream.rng();
    match kind {
        RandomKind::Herm => Ok(herm(&mut rng, n)),
        RandomKind::Unitary => Ok(unitary(&mut rng, n)),
        RandomKind::Invertible => invertible(&mut rng, n),
        RandomKind::Contraction => Ok(contraction(&mut rng, n, n)),
        RandomKind::HermCommutingWith(x) => herm_commuting_with(&mut rng, x),
    }
}

/// Standard complex Gaussian: independent `N(0, ½)` real and imaginary parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn real_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `(G + G*)/2`.
pub fn herm<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    gaussian(rng, n, n).hermitian_part()
}

/// Tuple of `d` independent Hermitian samples.
pub fn herm_tuple<R: Rng + ?Sized>(rng: &mut R, d: usize, n: usize) -> MatTuple {
    MatTuple::new((0..d).map(|_| herm(rng, n)).collect()).expect("same-size components")
}

/// Tuple of `d` independent Gaussian samples of shape `rows × cols`.
pub fn gaussian_tuple<R: Rng + ?Sized>(rng: &mut R, d: usize, rows: usize, cols: usize) -> MatTuple {
    MatTuple::new((0..d).map(|_| gaussian(rng, rows, cols)).collect()).expect("same-size components")
}

/// Orthonormalized Gaussian columns; the first nonzero entry of each column
/// is rotated to the positive real axis.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    loop {
        if let Some(u) = orthonormalize(&gaussian(rng, n, n)) {
            return u;
        }
    }
}

fn orthonormalize(g: &CMat) -> Option<CMat> {
    let n = g.cols();
    let mut q = g.clone();
    for j in 0..n {
        let mut col = q.column(j);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for k in 0..j {
                let basis = q.column(k);
                let proj: Complex64 = basis.iter().zip(&col).map(|(b, c)| b.conj() * c).sum();
                for (c, b) in col.iter_mut().zip(&basis) {
                    *c -= proj * b;
                }
            }
        }
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        let lead = col.iter().find(|c| c.norm() > 1e-14 * norm).copied().unwrap_or(ZERO);
        let phase = if lead == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            lead.conj() / lead.norm()
        };
        for c in col.iter_mut() {
            *c = *c * phase / norm;
        }
        q.set_column(j, &col);
    }
    Some(q)
}

/// Gaussian matrix resampled until `σ_min ≥ 0.05`.
pub fn invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<CMat> {
    for _ in 0..MAX_ATTEMPTS {
        let g = gaussian(rng, n, n);
        if min_singular_value(&g)? >= MIN_INVERTIBLE_SIGMA {
            return Ok(g);
        }
    }
    Err(NcError::GenerationFailure {
        what: format!("invertible {n}x{n} matrix"),
        attempts: MAX_ATTEMPTS,
    })
}

/// Gaussian matrix rescaled to a norm in `(0.09, 0.9]`.
pub fn contraction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    loop {
        let g = gaussian(rng, rows, cols);
        let norm = op_norm(&g);
        if norm > 0.0 {
            let target = CONTRACTION_NORM * rng.random_range(0.1..=1.0);
            return g.scale_re(target / norm);
        }
    }
}

/// A real polynomial of degree `≤ n−1` in Hermitian `x` with Gaussian
/// coefficients; the powers are taken of `x/max(1,‖x‖)` to stay well scaled.
pub fn herm_commuting_with<R: Rng + ?Sized>(rng: &mut R, x: &CMat) -> Result<CMat> {
    if !x.is_hermitian(super::spectral::HERM_TOL) {
        return Err(NcError::NotHermitian {
            deviation: x.hermitian_deviation(),
        });
    }
    let n = x.rows();
    let base = x.scale_re(1.0 / op_norm(x).max(1.0));
    let mut power = CMat::identity(n);
    let mut acc = CMat::zeros(n, n);
    for k in 0..n {
        if k > 0 {
            power = &power * &base;
        }
        acc = &acc + &power.scale_re(real_normal(rng));
    }
    Ok(acc.hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::super::spectral::unitarity_residual;
    use super::*;

    #[test]
    fn same_seed_and_index_reproduce() {
        let s = RandomStream::new(42).at(7);
        for kind in [
            RandomKind::Herm,
            RandomKind::Unitary,
            RandomKind::Invertible,
            RandomKind::Contraction,
        ] {
            assert_eq!(random_gen(&kind, 4, s).unwrap(), random_gen(&kind, 4, s).unwrap());
        }
        assert_ne!(
            random_gen(&RandomKind::Herm, 3, s).unwrap(),
            random_gen(&RandomKind::Herm, 3, s.at(8)).unwrap()
        );
    }

    #[test]
    fn kinds_meet_their_contracts() {
        for k in 0..50 {
            let s = RandomStream::new(3).at(k);
            let h = random_gen(&RandomKind::Herm, 4, s).unwrap();
            assert_eq!(h.hermitian_deviation(), 0.0);
            let u = random_gen(&RandomKind::Unitary, 4, s).unwrap();
            assert!(unitarity_residual(&u) < 1e-13);
            for j in 0..4 {
                let lead = u.column(j)[0];
                assert!(lead.im.abs() < 1e-15 && lead.re > 0.0);
            }
            let g = random_gen(&RandomKind::Invertible, 4, s).unwrap();
            assert!(min_singular_value(&g).unwrap() >= MIN_INVERTIBLE_SIGMA);
            let c = random_gen(&RandomKind::Contraction, 4, s).unwrap();
            assert!(op_norm(&c) <= CONTRACTION_NORM + 1e-12);
        }
    }

    #[test]
    fn commuting_generator_commutes() {
        for k in 0..20 {
            let s = RandomStream::new(11).at(k);
            let x = random_gen(&RandomKind::Herm, 5, s).unwrap();
            let p = random_gen(&RandomKind::HermCommutingWith(x.clone()), 5, s.at(k + 100)).unwrap();
            assert!(p.commutator(&x).unwrap().frobenius_norm() <= 1e-10);
            assert_eq!(p.hermitian_deviation(), 0.0);
        }
    }
}
