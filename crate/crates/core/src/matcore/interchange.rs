//! JSON interchange format for matrices and points.
//!
//! A matrix is `{"n": rows, "re": [[..]], "im": [[..]]}` in row-major order;
//! rectangular matrices add `"m": cols`. Tuples are arrays of matrices, and a
//! Hermitian pair point is `{"A": [..], "B": [..]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::cmat::CMat;
use super::tuple::MatTuple;
use crate::error::{NcError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMat> for MatJson {
    fn from(x: &CMat) -> Self {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..x.rows())
                .map(|i| (0..x.cols()).map(|j| f(&x[(i, j)])).collect())
                .collect()
        };
        MatJson {
            n: x.rows(),
            m: (!x.is_square()).then_some(x.cols()),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<MatJson> for CMat {
    type Error = NcError;

    fn try_from(j: MatJson) -> Result<CMat> {
        let rows = j.n;
        let cols = j.m.unwrap_or(j.n);
        let check = |part: &[Vec<f64>], name: &str| -> Result<()> {
            if part.len() != rows || part.iter().any(|r| r.len() != cols) {
                return Err(NcError::Format(format!("`{name}` is not {rows}x{cols}")));
            }
            Ok(())
        };
        check(&j.re, "re")?;
        check(&j.im, "im")?;
        let data =
            j.re.iter()
                .flatten()
                .zip(j.im.iter().flatten())
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        CMat::from_vec(rows, cols, data)
    }
}

pub fn mat_to_value(x: &CMat) -> Value {
    serde_json::to_value(MatJson::from(x)).expect("matrix serializes")
}

pub fn mat_from_value(v: &Value) -> Result<CMat> {
    let j: MatJson = serde_json::from_value(v.clone()).map_err(|e| NcError::Format(e.to_string()))?;
    CMat::try_from(j)
}

pub fn tuple_to_value(t: &MatTuple) -> Value {
    Value::Array(t.iter().map(mat_to_value).collect())
}

/// Reads a tuple; a bare matrix object is accepted as a 1-tuple.
pub fn tuple_from_value(v: &Value) -> Result<MatTuple> {
    match v {
        Value::Array(items) => MatTuple::new(items.iter().map(mat_from_value).collect::<Result<Vec<_>>>()?),
        Value::Object(_) => Ok(MatTuple::single(mat_from_value(v)?)),
        _ => Err(NcError::Format("expected a matrix or an array of matrices".into())),
    }
}

pub fn herm_point_to_value(a: &MatTuple, b: &MatTuple) -> Value {
    serde_json::json!({ "A": tuple_to_value(a), "B": tuple_to_value(b) })
}

/// Reads `{"A": .., "B": ..}` into the pair `(A, B)`.
pub fn herm_point_from_value(v: &Value) -> Result<(MatTuple, MatTuple)> {
    let get = |k: &str| v.get(k).ok_or_else(|| NcError::Format(format!("missing key `{k}`")));
    let a = tuple_from_value(get("A")?)?;
    let b = tuple_from_value(get("B")?)?;
    if a.arity() != b.arity() || a.shape() != b.shape() {
        return Err(NcError::Format("`A` and `B` differ in arity or size".into()));
    }
    Ok((a, b))
}

/// Reads any point: an `{"A","B"}` object becomes the concatenated tuple
/// `(A₁..A_d, B₁..B_d)`.
pub fn point_from_value(v: &Value) -> Result<MatTuple> {
    if v.get("A").is_some() {
        let (a, b) = herm_point_from_value(v)?;
        a.concat(&b)
    } else {
        tuple_from_value(v)
    }
}

pub fn parse_point(text: &str) -> Result<MatTuple> {
    let v: Value = serde_json::from_str(text).map_err(|e| NcError::Format(e.to_string()))?;
    point_from_value(&v)
}
