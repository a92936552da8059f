use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::laws::{check_direct_sums, check_intertwining, check_similarity, check_unitary_equiv};
use super::trace::{intertwiner_pair_gen, intertwining_construction_trace, real_to_nc_check};
use crate::error::{NcError, Result};
use crate::matcore::interchange::tuple_to_value;
use crate::matcore::random::{gaussian_tuple, herm_tuple, invertible, unitary};
use crate::matcore::{MatTuple, RandomStream};
use crate::ncexpr::{NcMap, Space};
use crate::report::{sort_reports, CheckReport, Tolerances, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    pub tols: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            sizes: vec![2, 3, 4],
            samples: 5,
            seed: 0,
            tols: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Law {
    Graded = 1,
    DirectSums,
    UnitaryEquiv,
    Similarity,
    Intertwining,
    IntertwiningTrace,
}

impl Law {
    const ALL: [Law; 6] = [
        Law::Graded,
        Law::DirectSums,
        Law::UnitaryEquiv,
        Law::Similarity,
        Law::Intertwining,
        Law::IntertwiningTrace,
    ];

    fn name(self) -> &'static str {
        match self {
            Law::Graded => "graded",
            Law::DirectSums => "direct_sums",
            Law::UnitaryEquiv => "unitary_equiv",
            Law::Similarity => "similarity",
            Law::Intertwining => "intertwining",
            Law::IntertwiningTrace => "intertwining_trace",
        }
    }
}

fn point<R: rand::Rng + ?Sized>(rng: &mut R, space: Space, d: usize, n: usize) -> MatTuple {
    match space {
        Space::Complex => gaussian_tuple(rng, d, n, n),
        Space::Hermitian => herm_tuple(rng, d, n),
    }
}

fn graded(w: &dyn NcMap, x: &MatTuple, tols: &Tolerances) -> Result<CheckReport> {
    let n = x.dim();
    let out = w.eval(x)?;
    let rep = CheckReport::graded("graded", 0.0, tols.algebraic, tols.fail_threshold)
        .with_witness(json!({ "X": tuple_to_value(x) }));
    Ok(if out.shape() != (n, n) {
        rep.fail_because(format!("NotGraded: {n}x{n} input gave {}x{}", out.rows(), out.cols()))
    } else if !out.is_finite() {
        rep.fail_because("NonFinite")
    } else {
        rep
    })
}

fn one_check(
    w: &dyn NcMap,
    law: Law,
    n: usize,
    k: usize,
    stream: RandomStream,
    tols: &Tolerances,
) -> Result<CheckReport> {
    let mut rng = stream.rng();
    let space = w.space();
    let d = w.arity();
    match law {
        Law::Graded => graded(w, &point(&mut rng, space, d, n), tols),
        Law::DirectSums => {
            let x = point(&mut rng, space, d, n);
            let y = point(&mut rng, space, d, 1 + k % n);
            check_direct_sums(w, &x, &y, tols)
        }
        Law::UnitaryEquiv => {
            let x = point(&mut rng, space, d, n);
            check_unitary_equiv(w, &x, &unitary(&mut rng, n), tols)
        }
        Law::Similarity => {
            let x = point(&mut rng, space, d, n);
            match space {
                Space::Complex => check_similarity(w, &x, &invertible(&mut rng, n)?, tols),
                Space::Hermitian => {
                    real_to_nc_check(w, &x, stream.at(stream.index ^ 1 << 31), tols).map(|r| CheckReport {
                        check: "similarity".into(),
                        ..r
                    })
                }
            }
        }
        Law::Intertwining | Law::IntertwiningTrace => {
            let m = 1 + k % n;
            let overlap = 1 + k % m;
            let p = intertwiner_pair_gen(n, m, overlap, d, stream)?;
            if law == Law::Intertwining {
                check_intertwining(w, &p.x, &p.y, &p.t, tols)
            } else {
                Ok(intertwining_construction_trace(&p.x, &p.y, &p.t)?.to_report(tols))
            }
        }
    }
}

fn error_report(law: Law, err: NcError, tols: &Tolerances) -> CheckReport {
    match err {
        NcError::DomainViolation(_) | NcError::NotPsd { .. } => {
            CheckReport::skipped(law.name(), "DomainViolation", tols.algebraic).note(err.to_string())
        }
        other => {
            CheckReport::graded(law.name(), 0.0, tols.algebraic, tols.fail_threshold).fail_because(other.to_string())
        }
    }
}

/// Runs every applicable law on random witnesses. Sample `k` of size `n`
/// draws from stream `(law << 16 | n, k)`, so results depend only on the
/// seed and are reported in canonical order.
pub fn run_suite(w: &dyn NcMap, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    if cfg.sizes.is_empty() || cfg.sizes.contains(&0) || cfg.samples == 0 {
        return Err(NcError::DimensionMismatch(
            "suite needs positive sizes and samples".into(),
        ));
    }
    let mut laws = vec![Law::Graded, Law::DirectSums, Law::UnitaryEquiv, Law::Similarity];
    if w.space() == Space::Hermitian {
        laws.extend([Law::Intertwining, Law::IntertwiningTrace]);
    }
    let root = RandomStream::new(cfg.seed);
    let mut reports = Vec::new();
    for &law in &laws {
        for (si, &n) in cfg.sizes.iter().enumerate() {
            for k in 0..cfg.samples {
                let stream = root.sample(((law as u32) << 16) | n as u32, k as u32);
                let rep =
                    one_check(w, law, n, k, stream, &cfg.tols).unwrap_or_else(|e| error_report(law, e, &cfg.tols));
                reports.push(
                    rep.with_seed(cfg.seed, (si * cfg.samples + k) as u64)
                        .metric("size", n as f64)
                        .metric("draw", k as f64),
                );
            }
        }
    }
    sort_reports(&mut reports);
    Ok(reports)
}

/// Reruns the single sample behind `report`, using its recorded seed, size
/// and draw index.
pub fn replay(w: &dyn NcMap, report: &CheckReport, tols: &Tolerances) -> Result<CheckReport> {
    let law = Law::ALL
        .into_iter()
        .find(|l| l.name() == report.check)
        .ok_or_else(|| NcError::Format(format!("no suite law named {:?}", report.check)))?;
    let field = |key: &str| {
        report
            .metrics
            .get(key)
            .map(|v| *v as usize)
            .ok_or_else(|| NcError::Format(format!("report lacks {key:?}")))
    };
    let (n, k) = (field("size")?, field("draw")?);
    let stream = RandomStream::new(report.seed).sample(((law as u32) << 16) | n as u32, k as u32);
    let rep = one_check(w, law, n, k, stream, tols).unwrap_or_else(|e| error_report(law, e, tols));
    Ok(rep
        .with_seed(report.seed, report.sample)
        .metric("size", n as f64)
        .metric("draw", k as f64))
}

/// Worst verdict per check: fail over gray over pass; skipped only when every
/// sample was skipped.
pub fn summarize(reports: &[CheckReport]) -> BTreeMap<String, Verdict> {
    let rank = |v: Verdict| match v {
        Verdict::Skipped => 0,
        Verdict::Pass => 1,
        Verdict::Gray => 2,
        Verdict::Fail => 3,
    };
    let mut out: BTreeMap<String, Verdict> = BTreeMap::new();
    for r in reports {
        let e = out.entry(r.check.clone()).or_insert(Verdict::Skipped);
        if rank(r.verdict) > rank(*e) {
            *e = r.verdict;
        }
    }
    out
}
