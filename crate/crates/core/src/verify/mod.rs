//! Randomized verification suites for the norm inequalities, identities and
//! scaling laws, with empirical-constant tables.
//!
//! Suites come in four flavours. Ratio suites report `LHS / RHS` of an
//! inequality with unknown constant and pass when the worst ratio is finite
//! and stable (within a factor 2) when the grid is refined from `n` to `2n`.
//! Identity suites check exact constants. Exponent suites fit power laws.
//! The tail suite checks the vanishing of truncated tails.

mod exponent;
mod identity;
mod quadrature;
mod ratio;
mod tail;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::Grid;

pub use exponent::{run_exponent_suite, EXPONENT_SUITES};
pub use identity::{run_identity_suite, IDENTITY_SUITES};
pub use quadrature::{fit_slope, tanh_sinh};
pub use ratio::{run_ratio_suite, RATIO_SUITES};
pub use tail::run_tail_suite;

/// Extra numeric parameters of a suite (exponents, windows, tolerances).
pub type SuiteParams = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub name: String,
    pub dim: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub params: SuiteParams,
}

impl SuiteConfig {
    pub fn new(name: &str, dim: usize, n: usize, trials: usize, seed: u64) -> Self {
        Self { name: name.to_string(), dim, n, trials, seed, params: SuiteParams::new() }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::periodic(self.dim, self.n).map_err(|e| Error::InvalidConfig(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Ratio,
    Identity,
    Exponent,
    Tail,
}

/// One data point: a per-trial ratio or error, or a `(scale, quantity)`
/// sample of an exponent fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SuiteRow {
    pub trial: usize,
    pub n: usize,
    pub x: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub kind: SuiteKind,
    pub dim: usize,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Parameters actually used, defaults included.
    pub params: SuiteParams,
    pub max: f64,
    pub median: f64,
    /// Worst ratio on the refined grid (ratio suites).
    pub max_refined: Option<f64>,
    /// `max(a/b, b/a)` of the two worst ratios (ratio suites).
    pub drift: Option<f64>,
    pub fitted_exponent: Option<f64>,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub violations: usize,
    pub passed: bool,
    pub notes: Vec<String>,
    pub rows: Vec<SuiteRow>,
}

impl SuiteResult {
    fn new(cfg: &SuiteConfig, kind: SuiteKind, params: SuiteParams) -> Self {
        Self {
            name: cfg.name.clone(),
            kind,
            dim: cfg.dim,
            n: cfg.n,
            trials: cfg.trials,
            seed: cfg.seed,
            params,
            max: f64::NAN,
            median: f64::NAN,
            max_refined: None,
            drift: None,
            fitted_exponent: None,
            target: None,
            tolerance: None,
            violations: 0,
            passed: false,
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn set_stats(&mut self, values: &[f64]) {
        self.max = values.iter().copied().fold(f64::NAN, f64::max);
        self.median = median(values);
    }

    /// One line summary for terminals.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{verdict} {} (n = {}, trials = {})", self.name, self.n, self.trials);
        if let Some(drift) = self.drift {
            s += &format!(
                " max = {:.6e}, refined max = {:.6e}, drift = {drift:.4}",
                self.max,
                self.max_refined.unwrap_or(f64::NAN)
            );
        } else if let (Some(fit), Some(target)) = (self.fitted_exponent, self.target) {
            s += &format!(" fitted = {fit:.6}, target = {target:.6}");
        } else {
            s += &format!(" max = {:.6e}, violations = {}", self.max, self.violations);
        }
        s
    }
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Independent generator for one trial of a suite.
pub(crate) fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Reads suite parameters, rejecting names the suite does not know.
pub(crate) struct ParamReader<'a> {
    given: &'a SuiteParams,
    used: SuiteParams,
}

impl<'a> ParamReader<'a> {
    pub(crate) fn new(given: &'a SuiteParams, known: &[&str]) -> Result<Self> {
        if let Some(bad) = given.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown suite parameter '{bad}' (known: {})", known.join(", "))));
        }
        Ok(Self { given, used: SuiteParams::new() })
    }

    pub(crate) fn get(&mut self, key: &str, default: f64) -> f64 {
        let v = self.given.get(key).copied().unwrap_or(default);
        self.used.insert(key.to_string(), v);
        v
    }

    pub(crate) fn finish(self) -> SuiteParams {
        self.used
    }
}

pub(crate) fn hypothesis(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

/// Every suite name understood by [`run_suite`].
pub fn suite_names() -> Vec<&'static str> {
    let mut all = Vec::new();
    all.extend_from_slice(RATIO_SUITES);
    all.extend_from_slice(IDENTITY_SUITES);
    all.extend_from_slice(EXPONENT_SUITES);
    all.push("tail");
    all
}

/// Dispatch on the suite name.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let name = cfg.name.as_str();
    if RATIO_SUITES.contains(&name) {
        run_ratio_suite(cfg)
    } else if IDENTITY_SUITES.contains(&name) {
        run_identity_suite(cfg)
    } else if EXPONENT_SUITES.contains(&name) {
        run_exponent_suite(cfg)
    } else if name == "tail" {
        run_tail_suite(cfg)
    } else {
        Err(Error::InvalidConfig(format!("unknown suite '{name}' (known: {})", suite_names().join(", "))))
    }
}
