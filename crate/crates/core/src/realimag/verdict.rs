use std::sync::Arc;

use serde::Serialize;

use super::cr::{cr_check, cr_samples, DerivRoute};
use super::lemmas::commutator_identity_check;
use super::{reconstruct, Reconstructed};
use crate::axioms::{run_suite, SuiteConfig};
use crate::calculus::{f_diff_check, FdiffOptions, StepSchedule};
use crate::error::Result;
use crate::matcore::random::{gaussian, gaussian_tuple, herm_tuple};
use crate::matcore::{MatOrTuple, RandomStream};
use crate::ncexpr::NcMap;
use crate::report::{sort_reports, CheckReport, Verdict};

const FDIFF_TAG: u32 = 7 << 16;
const COMMUTATOR_TAG: u32 = 8 << 16;
/// F-differentiability is sampled at no more points than this per size.
const FDIFF_SAMPLES: usize = 3;

/// Whether `f = u + iv` came out as an nc function, and the first law that
/// says otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NcVerdict {
    pub nc_function: bool,
    pub failing: Option<String>,
    pub gray: Vec<String>,
    pub reports: Vec<CheckReport>,
}

impl NcVerdict {
    pub fn headline(&self) -> String {
        match &self.failing {
            None => "nc-function: yes".to_string(),
            Some(law) => format!("nc-function: no ({law} fails)"),
        }
    }
}

/// Cauchy–Riemann equations, Fréchet differentiability of `u` and `v`, the
/// axiom suite on `u + iv` and the commutator identity, in that order.
pub fn nc_function_verdict(
    u: Arc<dyn NcMap>,
    v: Arc<dyn NcMap>,
    cfg: &SuiteConfig,
    sched: &StepSchedule,
) -> Result<NcVerdict> {
    let rec: Reconstructed = reconstruct(u.clone(), v.clone())?;
    let d = rec.d();
    let root = RandomStream::new(cfg.seed);
    let route = DerivRoute::FiniteDifference(sched.clone());
    let mut reports = Vec::new();

    let inputs = cr_samples(d, &cfg.sizes, cfg.samples, root);
    reports.extend(cr_check(u.as_ref(), v.as_ref(), &inputs, &route, cfg.seed, &cfg.tols)?.reports);

    let fopts = FdiffOptions {
        schedule: sched.clone(),
        ..FdiffOptions::default()
    };
    for (si, &n) in cfg.sizes.iter().enumerate() {
        for k in 0..cfg.samples.min(FDIFF_SAMPLES) {
            let stream = root.sample(FDIFF_TAG | n as u32, k as u32);
            let point = herm_tuple(&mut stream.rng(), 2 * d, n);
            for (part, map) in [("u", &u), ("v", &v)] {
                let rep = f_diff_check(
                    map.as_ref(),
                    &point,
                    stream.at(stream.index ^ 1 << 31),
                    &fopts,
                    &cfg.tols,
                )
                .unwrap_or_else(|e| {
                    CheckReport::graded("fdiff", 0.0, cfg.tols.fdiff_final, 1.0).fail_because(e.to_string())
                });
                reports.push(
                    CheckReport {
                        check: format!("fdiff_{part}"),
                        ..rep
                    }
                    .with_seed(cfg.seed, (si * cfg.samples + k) as u64),
                );
            }
        }
    }

    for rep in run_suite(&rec, cfg)? {
        reports.push(CheckReport {
            check: format!("axioms.{}", rep.check),
            ..rep
        });
    }

    for (si, &n) in cfg.sizes.iter().enumerate() {
        for k in 0..cfg.samples {
            let mut rng = root.sample(COMMUTATOR_TAG | n as u32, k as u32).rng();
            let x = gaussian_tuple(&mut rng, d, n, n);
            let t = MatOrTuple::Mat(gaussian(&mut rng, n, n));
            reports.push(
                commutator_identity_check(&rec, &route, &x, &t, &cfg.tols)?
                    .with_seed(cfg.seed, (si * cfg.samples + k) as u64),
            );
        }
    }

    let order = |check: &str| match check {
        "cr" => 0,
        c if c.starts_with("fdiff") => 1,
        c if c.starts_with("axioms.") => 2,
        _ => 3,
    };
    let failing = reports
        .iter()
        .filter(|r| r.failed())
        .min_by_key(|r| order(&r.check))
        .map(|r| r.check.clone());
    let mut gray: Vec<String> = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Gray)
        .map(|r| r.check.clone())
        .collect();
    gray.sort();
    gray.dedup();
    sort_reports(&mut reports);
    Ok(NcVerdict {
        nc_function: failing.is_none(),
        failing,
        gray,
        reports,
    })
}
