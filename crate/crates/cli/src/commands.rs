use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nccalc_core::axioms::run_suite;
use nccalc_core::calculus::{f_diff_check, g_derivative_algebraic, g_derivative_fd, FdiffOptions, StepSchedule};
use nccalc_core::matcore::interchange::{mat_to_value, parse_point};
use nccalc_core::matcore::random::{gaussian_tuple, herm_tuple};
use nccalc_core::matcore::{MatTuple, RandomStream};
use nccalc_core::ncexpr::{NcFunction, NcMap, Space, VarKind};
use nccalc_core::realimag::{
    cr_check, cr_samples, decompose as split, diag_respect_check, nc_function_verdict, symbolic_parts, DerivRoute,
};
use nccalc_core::{CheckReport, NcError, Verdict};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::exit::{self, CliError, CliResult};
use crate::exprs::{load, load_pair};
use crate::{ExprOpts, MethodArg, PairOpts, RouteArg};

const FDIFF_TAG: u32 = 0x11 << 16;
const DIAG_TAG: u32 = 0x12 << 16;

fn read_point(path: &Path) -> CliResult<MatTuple> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    parse_point(&text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn emit(cfg: &RunConfig, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    match &cfg.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    }
}

fn schedule(steps: Option<&str>) -> CliResult<StepSchedule> {
    match steps {
        None => Ok(StepSchedule::default()),
        Some(text) => {
            let steps = text
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::parse(format!("steps: cannot parse `{s}`")))
                })
                .collect::<CliResult<Vec<_>>>()?;
            StepSchedule::new(steps, 2).map_err(|e| CliError::parse(e.to_string()))
        }
    }
}

/// Per-check counts on stderr; exit 1 when anything failed.
fn summarize(reports: &[CheckReport]) -> i32 {
    let mut rows: BTreeMap<&str, [usize; 4]> = BTreeMap::new();
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    for r in reports {
        let slot = match r.verdict {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Gray => 2,
            Verdict::Skipped => 3,
        };
        rows.entry(&r.check).or_default()[slot] += 1;
        if r.verdict != Verdict::Skipped {
            let w = worst.entry(&r.check).or_insert(0.0);
            *w = w.max(r.residual);
        }
    }
    eprintln!(
        "{:<28} {:>5} {:>5} {:>5} {:>5}  max residual",
        "check", "pass", "fail", "gray", "skip"
    );
    for (check, c) in &rows {
        eprintln!(
            "{check:<28} {:>5} {:>5} {:>5} {:>5}  {:.3e}",
            c[0],
            c[1],
            c[2],
            c[3],
            worst.get(check).copied().unwrap_or(0.0)
        );
    }
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| r.failed()).collect();
    if let Some(first) = failed.first() {
        eprintln!(
            "FAIL: {} failing report(s); first: {} sample {} (seed {}){}",
            failed.len(),
            first.check,
            first.sample,
            first.seed,
            first.cause.as_deref().map(|c| format!(": {c}")).unwrap_or_default()
        );
        return exit::CHECK_FAILED;
    }
    if reports.iter().any(|r| r.verdict == Verdict::Gray) {
        eprintln!("warning: gray verdicts; rerun with a finer step schedule");
    }
    0
}

fn reports_value(reports: &[CheckReport]) -> Value {
    serde_json::to_value(reports).expect("reports serialize")
}

pub fn eval(cfg: &RunConfig, e: &ExprOpts, point: &Path) -> CliResult<i32> {
    let f = load(&e.expr, e.d, e.space, e.guard.as_deref())?;
    let x = read_point(point)?;
    let value = f.eval(&x)?;
    emit(
        cfg,
        &json!({
            "command": "eval",
            "expression": f.text(),
            "seed": cfg.seed,
            "value": mat_to_value(&value),
        }),
    )?;
    Ok(0)
}

pub fn derive(
    cfg: &RunConfig,
    e: &ExprOpts,
    point: &Path,
    dir: &Path,
    method: MethodArg,
    steps: Option<&str>,
) -> CliResult<i32> {
    let f = load(&e.expr, e.d, e.space, e.guard.as_deref())?;
    let sched = schedule(steps)?;
    let x = read_point(point)?;
    let z = read_point(dir)?;
    f.check_domain(&x).into_result()?;
    let alg = match method {
        MethodArg::Alg | MethodArg::Both => Some(g_derivative_algebraic(&f, &x, &z)?),
        MethodArg::Fd => None,
    };
    let fd = match method {
        MethodArg::Fd | MethodArg::Both => Some(g_derivative_fd(&f, &x, &z, &sched)?),
        MethodArg::Alg => None,
    };
    let mut out = json!({
        "command": "derive",
        "expression": f.text(),
        "seed": cfg.seed,
        "method": format!("{method:?}").to_lowercase(),
    });
    if let Some(a) = &alg {
        out["algebraic"] = a.to_value();
    }
    if let Some(d) = &fd {
        out["fd"] = d.to_value();
    }
    if let (Some(a), Some(d)) = (&alg, &fd) {
        let residual = (&a.value - &d.value).frobenius_norm() / a.value.frobenius_norm().max(1.0);
        out["inter_method_residual"] = json!(residual);
        eprintln!("inter-method residual {residual:.3e}");
    }
    emit(cfg, &out)?;
    Ok(0)
}

pub fn check_axioms(cfg: &RunConfig, e: &ExprOpts) -> CliResult<i32> {
    let f = load(&e.expr, e.d, e.space, e.guard.as_deref())?;
    let reports = run_suite(&f, &cfg.suite())?;
    emit(cfg, &reports_value(&reports))?;
    eprintln!("axioms for {} on {}", f.text(), f.space);
    Ok(summarize(&reports))
}

pub fn check_cr(
    cfg: &RunConfig,
    pair: Option<(String, String)>,
    expr: Option<&str>,
    d: Option<usize>,
    route: RouteArg,
    steps: Option<&str>,
) -> CliResult<i32> {
    let sched = schedule(steps)?;
    let (u, v, route): (Arc<dyn NcMap>, Arc<dyn NcMap>, DerivRoute) = match (pair, expr) {
        (Some((u, v)), None) => {
            if route == RouteArg::Alg {
                return Err(CliError::parse(
                    "--route alg needs -e; it differentiates the complex function",
                ));
            }
            let (u, v) = load_pair(&u, &v, d)?;
            (Arc::new(u), Arc::new(v), DerivRoute::FiniteDifference(sched))
        }
        (None, Some(text)) => {
            let dec = split(&load(text, d, None, None)?)?;
            let route = match route {
                RouteArg::Alg => {
                    if !dec.f.is_polynomial() {
                        return Err(
                            NcError::MethodRefused(format!("`{}` is not an nc polynomial", dec.f.text())).into(),
                        );
                    }
                    DerivRoute::Algebraic(dec.f.clone())
                }
                RouteArg::Fd => DerivRoute::FiniteDifference(sched),
            };
            (dec.u, dec.v, route)
        }
        _ => return Err(CliError::parse("give either -u and -v, or -e")),
    };
    let inputs = cr_samples(u.arity() / 2, &cfg.sizes, cfg.samples, RandomStream::new(cfg.seed));
    let rep = cr_check(u.as_ref(), v.as_ref(), &inputs, &route, cfg.seed, &cfg.tols)?;
    emit(cfg, &reports_value(&rep.reports))?;
    eprintln!(
        "cr for u = {}, v = {} ({} route)",
        u.describe(),
        v.describe(),
        route.name()
    );
    Ok(summarize(&rep.reports))
}

fn sample_point(f: &NcFunction, rng: &mut nccalc_core::matcore::SampleRng, n: usize) -> MatTuple {
    match f.space {
        Space::Hermitian => herm_tuple(rng, f.vars.arity(), n),
        Space::Complex => gaussian_tuple(rng, f.vars.arity(), n, n),
    }
}

fn error_report(check: &str, e: NcError, tol: f64) -> CheckReport {
    match e {
        NcError::DomainViolation(_) | NcError::NotPsd { .. } | NcError::NotHermitian { .. } => {
            CheckReport::skipped(check, "DomainViolation", tol).note(e.to_string())
        }
        other => CheckReport::graded(check, 0.0, tol, tol).fail_because(other.to_string()),
    }
}

pub fn check_fdiff(cfg: &RunConfig, e: &ExprOpts, steps: Option<&str>) -> CliResult<i32> {
    let f = load(&e.expr, e.d, e.space, e.guard.as_deref())?;
    let opts = FdiffOptions {
        schedule: schedule(steps)?,
        ..FdiffOptions::default()
    };
    let root = RandomStream::new(cfg.seed);
    let mut reports = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        for k in 0..cfg.samples {
            let stream = root.sample(FDIFF_TAG | n as u32, k as u32);
            let x = sample_point(&f, &mut stream.rng(), n);
            let rep = f_diff_check(&f, &x, stream.at(stream.index ^ 1 << 31), &opts, &cfg.tols)
                .unwrap_or_else(|err| error_report("fdiff", err, cfg.tols.fdiff_final));
            reports.push(rep.with_seed(cfg.seed, (si * cfg.samples + k) as u64));
        }
    }
    emit(cfg, &reports_value(&reports))?;
    eprintln!("fdiff for {}", f.text());
    Ok(summarize(&reports))
}

pub fn check_diag(cfg: &RunConfig, e: &ExprOpts, steps: Option<&str>) -> CliResult<i32> {
    let f = load(&e.expr, e.d, e.space, e.guard.as_deref())?;
    let sched = schedule(steps)?;
    let dec = split(&f)?;
    if !f.is_polynomial() {
        return Err(NcError::MethodRefused(format!("`{}` is not an nc polynomial", f.text())).into());
    }
    let d = f.vars.d();
    let root = RandomStream::new(cfg.seed);
    let mut reports = Vec::new();
    for (si, &n) in cfg.sizes.iter().enumerate() {
        for k in 0..cfg.samples {
            let mut rng = root.sample(DIAG_TAG | n as u32, k as u32).rng();
            let x = gaussian_tuple(&mut rng, d, n, n);
            // even draws take Y = X so the derivative identity is checked too
            let y = if k % 2 == 0 {
                x.clone()
            } else {
                gaussian_tuple(&mut rng, d, 1 + k % n, 1 + k % n)
            };
            let z = gaussian_tuple(&mut rng, d, n, y.dim());
            let rep = diag_respect_check(
                dec.u.as_ref(),
                dec.v.as_ref(),
                dec.f.as_ref(),
                &x,
                &y,
                &z,
                &sched,
                &cfg.tols,
            )
            .unwrap_or_else(|err| error_report("diag_respect", err, cfg.tols.block_identity));
            reports.push(rep.with_seed(cfg.seed, (si * cfg.samples + k) as u64));
        }
    }
    emit(cfg, &reports_value(&reports))?;
    eprintln!("diagonal respect for the parts of {}", f.text());
    Ok(summarize(&reports))
}

pub fn reconstruct(cfg: &RunConfig, p: &PairOpts, steps: Option<&str>) -> CliResult<i32> {
    let (u, v) = load_pair(&p.u, &p.v, p.d)?;
    let (ut, vt) = (u.text(), v.text());
    let verdict = nc_function_verdict(Arc::new(u), Arc::new(v), &cfg.suite(), &schedule(steps)?)?;
    emit(
        cfg,
        &json!({
            "command": "reconstruct",
            "u": ut,
            "v": vt,
            "seed": cfg.seed,
            "verdict": verdict.headline(),
            "nc_function": verdict.nc_function,
            "failing": verdict.failing,
            "gray": verdict.gray,
            "reports": reports_value(&verdict.reports),
        }),
    )?;
    let code = summarize(&verdict.reports);
    eprintln!("{}", verdict.headline());
    Ok(if verdict.nc_function { code } else { exit::CHECK_FAILED })
}

pub fn decompose(cfg: &RunConfig, e: &ExprOpts, point: Option<&Path>) -> CliResult<i32> {
    let f = load(&e.expr, e.d, e.space, e.guard.as_deref())?;
    if !matches!(f.vars, VarKind::ComplexVars(_)) {
        return Err(CliError::parse("decompose takes an expression in X1..Xd"));
    }
    let dec = split(&f)?;
    let (u, v) = symbolic_parts(&f)?;
    let mut out = json!({
        "command": "decompose",
        "expression": f.text(),
        "seed": cfg.seed,
        "u": u.text(),
        "v": v.text(),
    });
    if let Some(path) = point {
        let x = read_point(path)?;
        out["u_value"] = mat_to_value(&dec.u.eval(&x)?);
        out["v_value"] = mat_to_value(&dec.v.eval(&x)?);
    }
    emit(cfg, &out)?;
    Ok(0)
}
