use serde::Serialize;

use super::ast::{serialize, NcExpr, VarKind};
use super::eval::eval_expr;
use super::parser::parse;
use crate::error::{NcError, Result};
use crate::matcore::{herm_eig, MatTuple, HERM_TOL};

/// Open-domain predicate attached to an [`NcFunction`](super::NcFunction).
#[derive(Debug, Clone, PartialEq)]
pub enum DomainGuard {
    All,
    /// Spectra of the target expressions lie in `[lo, hi]`; no targets means
    /// every input component.
    SpectrumIn {
        lo: f64,
        hi: f64,
        targets: Vec<NcExpr>,
    },
    /// Tuple norm strictly below the bound.
    NormLt(f64),
}

/// Outcome of a domain check; never an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainVerdict {
    pub ok: bool,
    pub messages: Vec<String>,
    pub min_eigenvalue: Option<f64>,
}

impl DomainVerdict {
    fn pass() -> Self {
        DomainVerdict {
            ok: true,
            messages: Vec::new(),
            min_eigenvalue: None,
        }
    }

    fn fail(&mut self, msg: String) {
        self.ok = false;
        self.messages.push(msg);
    }

    fn saw_eigenvalue(&mut self, lam: f64) {
        self.min_eigenvalue = Some(self.min_eigenvalue.map_or(lam, |m| m.min(lam)));
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            Err(NcError::DomainViolation(self.messages.join("; ")))
        }
    }
}

impl DomainGuard {
    pub fn spectrum_in(lo: f64, hi: f64) -> Self {
        DomainGuard::SpectrumIn {
            lo,
            hi,
            targets: Vec::new(),
        }
    }

    pub(crate) fn check_into(&self, point: &MatTuple, vars: VarKind, out: &mut DomainVerdict) {
        match self {
            DomainGuard::All => {}
            DomainGuard::NormLt(bound) => {
                let norm = point.norm();
                if norm >= *bound {
                    out.fail(format!("norm {norm:e} is not below {bound:e}"));
                }
            }
            DomainGuard::SpectrumIn { lo, hi, targets } => {
                let mats: Vec<(String, Result<_>)> = if targets.is_empty() {
                    point
                        .iter()
                        .enumerate()
                        .map(|(k, m)| (vars.var_name(k), Ok(m.clone())))
                        .collect()
                } else {
                    targets
                        .iter()
                        .map(|t| (serialize(t, vars), eval_expr(t, point)))
                        .collect()
                };
                for (name, m) in mats {
                    let m = match m {
                        Ok(m) => m,
                        Err(e) => {
                            out.fail(format!("`{name}` cannot be evaluated: {e}"));
                            continue;
                        }
                    };
                    if !m.is_hermitian(HERM_TOL) {
                        out.fail(format!("`{name}` is not Hermitian, spectrum guard undefined"));
                        continue;
                    }
                    match herm_eig(&m.hermitian_part()) {
                        Ok(eig) => {
                            out.saw_eigenvalue(eig.min());
                            if eig.min() < *lo || eig.max() > *hi {
                                out.fail(format!(
                                    "spectrum of `{name}` spans [{:e}, {:e}], outside [{lo:e}, {hi:e}]",
                                    eig.min(),
                                    eig.max()
                                ));
                            }
                        }
                        Err(e) => out.fail(format!("`{name}`: {e}")),
                    }
                }
            }
        }
    }

    pub fn check(&self, point: &MatTuple, vars: VarKind) -> DomainVerdict {
        let mut v = DomainVerdict::pass();
        self.check_into(point, vars, &mut v);
        v
    }

    /// Text form: `all`, `norm<B`, or `spec[lo,hi]` with optional
    /// `:expr;expr` targets. Bounds accept `inf` and `-inf`.
    pub fn parse(text: &str, vars: VarKind) -> Result<Self> {
        let bad = |why: &str| NcError::Format(format!("guard `{text}`: {why}"));
        let t = text.trim();
        if t == "all" {
            return Ok(DomainGuard::All);
        }
        if let Some(b) = t.strip_prefix("norm<") {
            let bound: f64 = b.trim().parse().map_err(|_| bad("bound is not a number"))?;
            return Ok(DomainGuard::NormLt(bound));
        }
        if let Some(rest) = t.strip_prefix("spec[") {
            let (interval, targets) = match rest.split_once(':') {
                Some((i, tg)) => (i, Some(tg)),
                None => (rest, None),
            };
            let interval = interval.trim().strip_suffix(']').ok_or_else(|| bad("missing `]`"))?;
            let (lo, hi) = interval.split_once(',').ok_or_else(|| bad("expected `lo,hi`"))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("bound is not a number"));
            let (lo, hi) = (num(lo)?, num(hi)?);
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(bad("empty interval"));
            }
            let targets = match targets {
                Some(tg) => tg.split(';').map(|e| parse(e, vars)).collect::<Result<Vec<_>>>()?,
                None => Vec::new(),
            };
            return Ok(DomainGuard::SpectrumIn { lo, hi, targets });
        }
        Err(bad("expected `all`, `norm<B` or `spec[lo,hi]`"))
    }
}
