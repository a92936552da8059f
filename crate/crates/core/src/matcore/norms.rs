use super::cmat::I;
use super::tuple::MatTuple;
use crate::error::{NcError, Result};

/// Slack allowed on both sides of the pair-norm inequalities.
pub const NORM_COMPARE_SLACK: f64 = 1e-10;

/// `max_k ‖Z^(k)‖` over the components of a tuple.
pub fn pair_norm(z: &MatTuple) -> f64 {
    z.norm()
}

/// Outcome of comparing `‖(Z₁,Z₂)‖` with `‖Z₁ + iZ₂‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormComparison {
    /// `‖(Z₁,Z₂)‖ ≤ ‖Z₁+iZ₂‖`
    pub lower_ok: bool,
    /// `‖Z₁+iZ₂‖ ≤ 2‖(Z₁,Z₂)‖`
    pub upper_ok: bool,
    /// `‖Z₁+iZ₂‖ / ‖(Z₁,Z₂)‖`, or 1 when both vanish.
    pub ratio: f64,
    pub pair: f64,
    pub complex: f64,
}

/// For Hermitian tuples `Z₁, Z₂` the complex combination is squeezed
/// between one and two times the pair norm.
pub fn norm_compare(z1: &MatTuple, z2: &MatTuple, herm_tol: f64) -> Result<NormComparison> {
    if z1.arity() != z2.arity() || z1.shape() != z2.shape() {
        return Err(NcError::ShapeMismatch(format!(
            "tuples of arity {} {:?} and {} {:?}",
            z1.arity(),
            z1.shape(),
            z2.arity(),
            z2.shape()
        )));
    }
    for m in z1.iter().chain(z2.iter()) {
        if !m.is_hermitian(herm_tol) {
            return Err(NcError::NotHermitian {
                deviation: m.hermitian_deviation(),
            });
        }
    }
    let pair = pair_norm(z1).max(pair_norm(z2));
    let complex = pair_norm(&z1.try_zip(z2, |a, b| a.checked_add(&b.scale(I)))?);
    let slack = NORM_COMPARE_SLACK * pair.max(1.0);
    Ok(NormComparison {
        lower_ok: pair <= complex + slack,
        upper_ok: complex <= 2.0 * pair + slack,
        ratio: if pair == 0.0 { 1.0 } else { complex / pair },
        pair,
        complex,
    })
}
