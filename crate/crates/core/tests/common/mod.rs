#![allow(dead_code)]

use nccalc_core::matcore::random::real_normal;
use nccalc_core::matcore::{CMat, MatTuple};
use nccalc_core::ncexpr::NcExpr;
use num_complex::Complex64;
use rand::Rng;

/// A noncommutative polynomial kept as explicit words, so tests can compute
/// its values and its block derivative independently of the evaluator.
#[derive(Debug, Clone)]
pub struct Poly {
    pub terms: Vec<(Complex64, Vec<usize>)>,
}

impl Poly {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, max_degree: usize, real: bool) -> Poly {
        let n_terms = rng.random_range(1..=4);
        let terms = (0..n_terms)
            .map(|t| {
                // the first term always carries the full degree
                let len = if t == 0 {
                    max_degree
                } else {
                    rng.random_range(0..=max_degree)
                };
                let word = (0..len).map(|_| rng.random_range(0..d)).collect();
                let im = if real { 0.0 } else { real_normal(rng) };
                (Complex64::new(real_normal(rng), im), word)
            })
            .collect();
        Poly { terms }
    }

    pub fn expr(&self) -> NcExpr {
        let mut acc: Option<NcExpr> = None;
        for (c, word) in &self.terms {
            let term = match word.split_first() {
                None => NcExpr::Const(*c),
                Some((&first, rest)) => {
                    let w = rest
                        .iter()
                        .fold(NcExpr::var(first), |e, &i| NcExpr::mul(e, NcExpr::var(i)));
                    NcExpr::scalar_mul(*c, w)
                }
            };
            acc = Some(match acc {
                None => term,
                Some(a) => NcExpr::add(a, term),
            });
        }
        acc.expect("at least one term")
    }

    pub fn eval(&self, x: &MatTuple) -> CMat {
        let n = x.dim();
        let mut out = CMat::zeros(n, n);
        for (c, word) in &self.terms {
            let m = word.iter().fold(CMat::identity(n), |m, &i| &m * x.get(i));
            out = &out + &m.scale(*c);
        }
        out
    }

    /// `Σ X_{i1}⋯X_{i(j−1)} Z_{ij} Y_{i(j+1)}⋯Y_{ik}` over every word.
    pub fn delta(&self, x: &MatTuple, y: &MatTuple, z: &MatTuple) -> CMat {
        let (n, m) = (x.dim(), y.dim());
        let mut out = CMat::zeros(n, m);
        for (c, word) in &self.terms {
            for j in 0..word.len() {
                let left = word[..j].iter().fold(CMat::identity(n), |a, &i| &a * x.get(i));
                let right = word[j + 1..].iter().fold(CMat::identity(m), |a, &i| &a * y.get(i));
                out = &out + &(&(&left * z.get(word[j])) * &right).scale(*c);
            }
        }
        out
    }
}

pub fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(1e-300)
}
