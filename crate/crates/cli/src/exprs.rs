use clap::ValueEnum;
use nccalc_core::ncexpr::{parse, DomainGuard, NcFunction, VarKind};
use nccalc_core::NcError;

use crate::exit::{CliError, CliResult};

/// Upper bound on variable indices when sniffing the variable kind.
const PROBE_ARITY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    /// all square complex tuples
    Cnc,
    /// Hermitian tuples
    Hnc,
}

fn infer(text: &str) -> Result<VarKind, NcError> {
    match parse(text, VarKind::ComplexVars(PROBE_ARITY)) {
        Ok(e) => Ok(VarKind::ComplexVars(e.max_var().map_or(1, |k| k + 1))),
        Err(NcError::UnknownVariable(name)) if name.starts_with('A') || name.starts_with('B') => {
            let e = parse(text, VarKind::RealPairs(PROBE_ARITY))?;
            Ok(VarKind::RealPairs(e.max_var().map_or(1, |k| k % PROBE_ARITY + 1)))
        }
        Err(e) => Err(e),
    }
}

/// Parses `text`, taking the variable kind from the names used (`X` or
/// `A`/`B`) and the arity from `d` or else the largest index.
pub fn load(text: &str, d: Option<usize>, space: Option<SpaceArg>, guard: Option<&str>) -> CliResult<NcFunction> {
    let kind = match (infer(text)?, d) {
        (VarKind::ComplexVars(_), Some(d)) => VarKind::ComplexVars(d),
        (VarKind::RealPairs(_), Some(d)) => VarKind::RealPairs(d),
        (k, None) => k,
    };
    if kind.d() == 0 {
        return Err(CliError::parse("arity must be at least 1"));
    }
    let mut f = NcFunction::parse(text, kind)?;
    match (kind, space) {
        (VarKind::ComplexVars(_), Some(SpaceArg::Hnc)) => f = f.restricted_to_hermitian(),
        (VarKind::RealPairs(_), Some(SpaceArg::Cnc)) => {
            return Err(CliError::parse(
                "expressions in A/B pairs live on Hermitian tuples; drop --space cnc",
            ))
        }
        _ => {}
    }
    if let Some(g) = guard {
        f = f.with_guard(DomainGuard::parse(g, kind)?);
    }
    Ok(f)
}

/// Parses the real pair `(u, v)` in `A`/`B` variables with a common arity:
/// `d` when given, else the largest index used in either.
pub fn load_pair(u: &str, v: &str, d: Option<usize>) -> CliResult<(NcFunction, NcFunction)> {
    let probe = |text: &str| -> CliResult<usize> {
        let e = parse(text, VarKind::RealPairs(PROBE_ARITY)).map_err(|err| match err {
            NcError::UnknownVariable(name) => {
                CliError::parse(format!("unknown variable `{name}`; u and v use A1.., B1.."))
            }
            other => other.into(),
        })?;
        Ok(e.max_var().map_or(1, |k| k % PROBE_ARITY + 1))
    };
    let d = match d {
        Some(d) => d,
        None => probe(u)?.max(probe(v)?),
    };
    if d == 0 {
        return Err(CliError::parse("arity must be at least 1"));
    }
    Ok((
        NcFunction::parse(u, VarKind::RealPairs(d))?,
        NcFunction::parse(v, VarKind::RealPairs(d))?,
    ))
}
