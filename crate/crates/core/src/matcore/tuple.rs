//! Matrix tuples and block assembly.

use num_complex::Complex64;

use super::cmat::CMat;
use crate::error::{NcError, Result};

/// A `d`-tuple of matrices sharing one shape; points of `(C^{n×n})^d`.
///
/// Direction tuples for the difference-differential operator are
/// rectangular, so the shared shape need not be square.
#[derive(Debug, Clone, PartialEq)]
pub struct MatTuple {
    mats: Vec<CMat>,
}

impl MatTuple {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(NcError::ShapeMismatch("empty tuple".into()));
        };
        let shape = first.shape();
        if mats.iter().any(|m| m.shape() != shape) {
            return Err(NcError::DimensionMismatch(
                "tuple components have different shapes".into(),
            ));
        }
        Ok(Self { mats })
    }

    pub fn single(m: CMat) -> Self {
        Self { mats: vec![m] }
    }

    pub fn zeros(arity: usize, rows: usize, cols: usize) -> Self {
        Self {
            mats: vec![CMat::zeros(rows, cols); arity],
        }
    }

    pub fn arity(&self) -> usize {
        self.mats.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.mats[0].shape()
    }

    /// Size `n` of a square tuple.
    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn is_square(&self) -> bool {
        self.mats[0].is_square()
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn into_mats(self) -> Vec<CMat> {
        self.mats
    }

    pub fn get(&self, k: usize) -> &CMat {
        &self.mats[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &CMat> {
        self.mats.iter()
    }

    pub fn map(&self, f: impl Fn(&CMat) -> CMat) -> MatTuple {
        MatTuple {
            mats: self.mats.iter().map(f).collect(),
        }
    }

    pub fn try_zip(&self, other: &MatTuple, f: impl Fn(&CMat, &CMat) -> Result<CMat>) -> Result<MatTuple> {
        if self.arity() != other.arity() {
            return Err(NcError::ArityMismatch {
                expected: self.arity(),
                got: other.arity(),
            });
        }
        let mats = self
            .mats
            .iter()
            .zip(&other.mats)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        MatTuple::new(mats)
    }

    pub fn add(&self, other: &MatTuple) -> Result<MatTuple> {
        self.try_zip(other, CMat::checked_add)
    }

    pub fn sub(&self, other: &MatTuple) -> Result<MatTuple> {
        self.try_zip(other, CMat::checked_sub)
    }

    pub fn scale(&self, c: Complex64) -> MatTuple {
        self.map(|m| m.scale(c))
    }

    pub fn scale_re(&self, c: f64) -> MatTuple {
        self.map(|m| m.scale_re(c))
    }

    /// `self + t·dir`, componentwise.
    pub fn axpy(&self, t: f64, dir: &MatTuple) -> Result<MatTuple> {
        self.try_zip(dir, |a, b| a.checked_add(&b.scale_re(t)))
    }

    pub fn adjoint(&self) -> MatTuple {
        self.map(CMat::adjoint)
    }

    /// Tuple norm `max_k ‖Z^(k)‖` with the operator norm on components.
    pub fn norm(&self) -> f64 {
        self.mats.iter().map(super::op_norm).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mats.iter().map(|m| m.frobenius_norm().powi(2)).sum::<f64>().sqrt()
    }

    /// Concatenation `(self, other)` as one tuple of arity `d₁+d₂`.
    pub fn concat(&self, other: &MatTuple) -> Result<MatTuple> {
        let mut mats = self.mats.clone();
        mats.extend(other.mats.iter().cloned());
        MatTuple::new(mats)
    }

    /// Splits a tuple of even arity into its halves `(A, B)`.
    pub fn split_pair(&self) -> Result<(MatTuple, MatTuple)> {
        if !self.arity().is_multiple_of(2) {
            return Err(NcError::KindMismatch(format!(
                "a real pair point needs even arity, got {}",
                self.arity()
            )));
        }
        let d = self.arity() / 2;
        Ok((
            MatTuple {
                mats: self.mats[..d].to_vec(),
            },
            MatTuple {
                mats: self.mats[d..].to_vec(),
            },
        ))
    }

    /// `A + iB` componentwise.
    pub fn complexify(a: &MatTuple, b: &MatTuple) -> Result<MatTuple> {
        a.try_zip(b, |x, y| x.checked_add(&y.scale(super::cmat::I)))
    }

    /// Hermitian and skew parts `(A, B)` with `X = A + iB`.
    pub fn real_imag_parts(&self) -> (MatTuple, MatTuple) {
        (self.map(CMat::hermitian_part), self.map(CMat::imaginary_part))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.mats.iter().map(CMat::hermitian_deviation).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.mats.iter().all(|m| m.is_hermitian(tol))
    }
}

/// Componentwise block-diagonal sum `X ⊕ Y`.
pub fn direct_sum(x: &MatTuple, y: &MatTuple) -> Result<MatTuple> {
    if x.arity() != y.arity() {
        return Err(NcError::ArityMismatch {
            expected: x.arity(),
            got: y.arity(),
        });
    }
    MatTuple::new(x.mats.iter().zip(&y.mats).map(|(a, b)| a.direct_sum(b)).collect())
}

/// The four blocks of a 2×2 block matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub top_left: CMat,
    pub top_right: CMat,
    pub bottom_left: CMat,
    pub bottom_right: CMat,
}

/// Assembles `[[tl, tr], [bl, br]]`.
pub fn block2_assemble(tl: &CMat, tr: &CMat, bl: &CMat, br: &CMat) -> Result<CMat> {
    if tl.rows() != tr.rows() || bl.rows() != br.rows() || tl.cols() != bl.cols() || tr.cols() != br.cols() {
        return Err(NcError::ShapeMismatch(format!(
            "blocks {:?} {:?} / {:?} {:?} do not tile",
            tl.shape(),
            tr.shape(),
            bl.shape(),
            br.shape()
        )));
    }
    let mut out = CMat::zeros(tl.rows() + bl.rows(), tl.cols() + tr.cols());
    out.set_block(0, 0, tl);
    out.set_block(0, tl.cols(), tr);
    out.set_block(tl.rows(), 0, bl);
    out.set_block(tl.rows(), tl.cols(), br);
    Ok(out)
}

/// Splits a square `(n+m)` matrix into blocks with `n` leading rows and columns.
pub fn block2_extract(m: &CMat, n: usize) -> Result<Blocks> {
    block2_extract_rect(m, n, n)
}

/// Splits at row `row_split` and column `col_split`.
pub fn block2_extract_rect(m: &CMat, row_split: usize, col_split: usize) -> Result<Blocks> {
    if row_split > m.rows() || col_split > m.cols() {
        return Err(NcError::ShapeMismatch(format!(
            "split ({row_split},{col_split}) outside {:?}",
            m.shape()
        )));
    }
    let (r2, c2) = (m.rows() - row_split, m.cols() - col_split);
    Ok(Blocks {
        top_left: m.block(0, 0, row_split, col_split),
        top_right: m.block(0, col_split, row_split, c2),
        bottom_left: m.block(row_split, 0, r2, col_split),
        bottom_right: m.block(row_split, col_split, r2, c2),
    })
}

/// Componentwise block assembly of tuples.
pub fn block2_assemble_tuple(tl: &MatTuple, tr: &MatTuple, bl: &MatTuple, br: &MatTuple) -> Result<MatTuple> {
    let d = tl.arity();
    if [tr.arity(), bl.arity(), br.arity()].iter().any(|&a| a != d) {
        return Err(NcError::ArityMismatch {
            expected: d,
            got: tr.arity().max(bl.arity()).max(br.arity()),
        });
    }
    MatTuple::new(
        (0..d)
            .map(|k| block2_assemble(tl.get(k), tr.get(k), bl.get(k), br.get(k)))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Either a single matrix or a tuple; commutators broadcast a single matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MatOrTuple {
    Mat(CMat),
    Tuple(MatTuple),
}

/// `[S, Q] = SQ − QS`, componentwise on tuples, broadcasting a single matrix.
pub fn commutator(s: &MatOrTuple, q: &MatOrTuple) -> Result<MatOrTuple> {
    use MatOrTuple::*;
    Ok(match (s, q) {
        (Mat(a), Mat(b)) => Mat(a.commutator(b)?),
        (Mat(a), Tuple(t)) => Tuple(MatTuple::new(
            t.iter().map(|b| a.commutator(b)).collect::<Result<Vec<_>>>()?,
        )?),
        (Tuple(t), Mat(b)) => Tuple(MatTuple::new(
            t.iter().map(|a| a.commutator(b)).collect::<Result<Vec<_>>>()?,
        )?),
        (Tuple(a), Tuple(b)) => Tuple(a.try_zip(b, CMat::commutator)?),
    })
}

/// `[T, X]` for a tuple `T` (or a single matrix broadcast to every slot).
pub fn tuple_commutator(t: &MatOrTuple, x: &MatTuple) -> Result<MatTuple> {
    match commutator(t, &MatOrTuple::Tuple(x.clone()))? {
        MatOrTuple::Tuple(r) => Ok(r),
        MatOrTuple::Mat(_) => unreachable!("tuple argument yields a tuple"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::cmat::pauli::*;
    use super::*;

    #[test]
    fn block_roundtrip() {
        let a = CMat::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = CMat::from_real_rows(&[vec![5.0], vec![6.0]]);
        let c = CMat::from_real_rows(&[vec![7.0, 8.0]]);
        let d = CMat::from_real_rows(&[vec![9.0]]);
        let m = block2_assemble(&a, &b, &c, &d).unwrap();
        assert_eq!(m.shape(), (3, 3));
        let blocks = block2_extract(&m, 2).unwrap();
        assert_eq!(blocks.top_left, a);
        assert_eq!(blocks.top_right, b);
        assert_eq!(blocks.bottom_left, c);
        assert_eq!(blocks.bottom_right, d);
        assert!(block2_assemble(&a, &c, &c, &d).is_err());
    }

    #[test]
    fn direct_sum_arity_mismatch() {
        let x = MatTuple::single(sigma_x());
        let y = MatTuple::new(vec![sigma_x(), sigma_z()]).unwrap();
        assert!(matches!(direct_sum(&x, &y), Err(NcError::ArityMismatch { .. })));
        let s = direct_sum(&x, &x).unwrap();
        assert_eq!(s.dim(), 4);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn commutator_broadcasts_single_matrix() {
        let t = MatOrTuple::Mat(sigma_x());
        let x = MatTuple::new(vec![sigma_z(), sigma_x()]).unwrap();
        let c = tuple_commutator(&t, &x).unwrap();
        assert_eq!(c.get(0), &sigma_x().commutator(&sigma_z()).unwrap());
        assert_eq!(c.get(1), &CMat::zeros(2, 2));
    }

    #[test]
    fn tuples_reject_mixed_shapes() {
        assert!(MatTuple::new(vec![CMat::zeros(2, 2), CMat::zeros(3, 3)]).is_err());
        assert!(MatTuple::new(vec![]).is_err());
    }
}
