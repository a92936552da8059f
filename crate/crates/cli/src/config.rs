use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use nccalc_core::axioms::SuiteConfig;
use nccalc_core::Tolerances;

use crate::exit::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    /// Master seed; recorded in every report
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated matrix sizes, e.g. 2,3,4
    #[arg(long, global = true)]
    pub sizes: Option<String>,
    /// Samples per size
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Tolerance for identities that hold up to rounding
    #[arg(long = "tol-alg", global = true)]
    pub tol_alg: Option<f64>,
    /// Tolerance for checks built on finite differences
    #[arg(long = "tol-fd", global = true)]
    pub tol_fd: Option<f64>,
    /// Residuals above this fail; between tolerance and this are gray
    #[arg(long = "fail-threshold", global = true)]
    pub fail_threshold: Option<f64>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key=value file with the same keys as these flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub tols: Tolerances,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let suite = SuiteConfig::default();
        RunConfig {
            seed: suite.seed,
            sizes: suite.sizes,
            samples: suite.samples,
            tols: suite.tols,
            out: None,
        }
    }
}

const KEYS: [&str; 7] = ["seed", "sizes", "samples", "tol-alg", "tol-fd", "fail-threshold", "out"];

fn read_file(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::parse(format!("{}:{}: expected key=value", path.display(), lineno + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::parse(format!(
                "{}:{}: unknown key `{}`",
                path.display(),
                lineno + 1,
                k.trim()
            )));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, text: &str) -> CliResult<T> {
    text.parse()
        .map_err(|_| CliError::parse(format!("{key}: cannot parse `{text}`")))
}

pub fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    text.split(',').map(|s| num("sizes", s.trim())).collect()
}

impl RunConfig {
    /// Built-in defaults, then the config file, then flags.
    pub fn resolve(g: &GlobalOpts) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &g.config {
            for (k, v) in read_file(path)? {
                match k.as_str() {
                    "seed" => cfg.seed = num(&k, &v)?,
                    "sizes" => cfg.sizes = parse_sizes(&v)?,
                    "samples" => cfg.samples = num(&k, &v)?,
                    "tol-alg" => cfg.tols.algebraic = num(&k, &v)?,
                    "tol-fd" => cfg.tols.fd = num(&k, &v)?,
                    "fail-threshold" => cfg.tols.fail_threshold = num(&k, &v)?,
                    _ => cfg.out = Some(PathBuf::from(v)),
                }
            }
        }
        if let Some(s) = g.seed {
            cfg.seed = s;
        }
        if let Some(s) = &g.sizes {
            cfg.sizes = parse_sizes(s)?;
        }
        if let Some(s) = g.samples {
            cfg.samples = s;
        }
        if let Some(t) = g.tol_alg {
            cfg.tols.algebraic = t;
        }
        if let Some(t) = g.tol_fd {
            cfg.tols.fd = t;
        }
        if let Some(t) = g.fail_threshold {
            cfg.tols.fail_threshold = t;
        }
        if g.out.is_some() {
            cfg.out = g.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        let t = &self.tols;
        if [t.algebraic, t.fd, t.fail_threshold]
            .iter()
            .any(|x| !(x.is_finite() && *x > 0.0))
        {
            return Err(CliError::parse("tolerances must be positive"));
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return Err(CliError::parse("sizes must be at least 1"));
        }
        if self.samples == 0 {
            return Err(CliError::parse("samples must be at least 1"));
        }
        Ok(())
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            sizes: self.sizes.clone(),
            samples: self.samples,
            seed: self.seed,
            tols: self.tols,
        }
    }
}
