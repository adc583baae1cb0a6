use rand::Rng;
use rayon::prelude::*;

use super::{hypothesis, trial_rng, ParamReader, SuiteConfig, SuiteKind, SuiteResult, SuiteRow};
use crate::duhamel::heat_evolve;
use crate::error::Result;
use crate::lorentz::{conjugate, fourier_lebesgue_norm, sfl_norm, NormSpec};
use crate::sampler::{FieldSampler, SpectrumShape};
use crate::spectral::{derivative, Grid, SpectralField};

pub const IDENTITY_SUITES: &[&str] = &["lpp", "heat", "deriv_equiv"];

/// All multi-indices of order `k` in `d` variables.
pub(crate) fn multi_indices(d: usize, k: u32) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![k]];
    }
    (0..=k)
        .rev()
        .flat_map(|first| {
            multi_indices(d - 1, k - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
enum Check {
    /// `|‖u‖_{Ḣ^s_{𝓛^{p,p'}}} / ‖|ξ|^s û‖_{L^{p'}} - 1|`.
    Lpp { s: f64, p: f64 },
    /// `‖e^{tΔ}u‖ / ‖u‖` must not exceed 1.
    Heat { spec: NormSpec, t_max: f64 },
    /// Worst of the two normalized one-sided bounds; each must not exceed 1.
    DerivEquiv { k: u32, p: f64, r: f64 },
}

impl Check {
    /// Returns `(value, violated)` for one field.
    fn evaluate(&self, u: &SpectralField, trial: usize, rng: &mut impl Rng, tol: f64) -> Result<(f64, f64, bool)> {
        Ok(match *self {
            Check::Lpp { s, p } => {
                let a = sfl_norm(u, &NormSpec::new(s, p, conjugate(p))?)?;
                let b = fourier_lebesgue_norm(u, s, conjugate(p))?;
                let err = (a / b - 1.0).abs();
                (f64::NAN, err, !(err <= tol))
            }
            Check::Heat { spec, t_max } => {
                let t = if trial == 0 { 0.0 } else { rng.random_range(0.0..t_max) };
                let ratio = sfl_norm(&heat_evolve(u, t)?, &spec)? / sfl_norm(u, &spec)?;
                (t, ratio, !(ratio <= 1.0 + tol))
            }
            Check::DerivEquiv { k, p, r } => {
                let d = u.grid().dim();
                let flat = NormSpec::new(0.0, p, r)?;
                let full = sfl_norm(u, &NormSpec::new(k as f64, p, r)?)?;
                let mut sum = 0.0;
                let alphas = multi_indices(d, k);
                for alpha in &alphas {
                    sum += sfl_norm(&derivative(u, alpha)?, &flat)?;
                }
                let upper = sum / (alphas.len() as f64 * full);
                let lower = full / ((d as f64).powf(k as f64 / 2.0) * sum);
                let worst = upper.max(lower);
                (f64::NAN, worst, !(worst <= 1.0 + tol))
            }
        })
    }
}

fn parse(cfg: &SuiteConfig) -> Result<(Check, f64, f64, super::SuiteParams)> {
    let d = cfg.dim as f64;
    let known: &[&str] = match cfg.name.as_str() {
        "lpp" => &["s", "p", "slope", "tol"],
        "heat" => &["s", "p", "r", "t_max", "slope", "tol"],
        _ => &["k", "p", "r", "slope", "tol"],
    };
    let mut pr = ParamReader::new(&cfg.params, known)?;
    let (check, default_tol) = match cfg.name.as_str() {
        "lpp" => {
            let s = pr.get("s", 0.0);
            let p = pr.get("p", 1.5);
            if !(p > 1.0 && p.is_finite()) {
                return Err(hypothesis(format!("need 1 < p < ∞ for the L^{{p,p'}} equality, got p = {p}")));
            }
            (Check::Lpp { s, p }, 1e-12)
        }
        "heat" => {
            let spec = NormSpec::new(pr.get("s", 0.5), pr.get("p", 2.0), pr.get("r", 2.0))
                .map_err(|e| hypothesis(e.to_string()))?;
            let t_max = pr.get("t_max", 1.0);
            if !(t_max > 0.0 && t_max.is_finite()) {
                return Err(hypothesis(format!("need heat times t_max > 0, got {t_max}")));
            }
            (Check::Heat { spec, t_max }, 1e-10)
        }
        _ => {
            let k = pr.get("k", 1.0);
            let p = pr.get("p", 2.0);
            let r = pr.get("r", 2.0);
            if k.fract() != 0.0 || k < 0.0 {
                return Err(hypothesis(format!("need an integer order k >= 0, got k = {k}")));
            }
            if !(p >= 1.0 && r >= 1.0 && r <= conjugate(p)) {
                return Err(hypothesis(format!(
                    "need 1 <= r <= p' for the triangle inequality in L^{{p',r}}, got p = {p}, r = {r}"
                )));
            }
            (Check::DerivEquiv { k: k as u32, p, r }, 1e-10)
        }
    };
    let slope = pr.get("slope", d / 2.0 + 0.5);
    let tol = pr.get("tol", default_tol);
    Ok((check, slope, tol, pr.finish()))
}

pub fn run_identity_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let (check, slope, tol, params) = parse(cfg)?;
    let grid: Grid = cfg.grid()?;
    let shape = SpectrumShape { slope, ..Default::default() };
    let sampler = FieldSampler::new(grid, 1, shape);
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial);
            let u = sampler.sample(&mut rng);
            check
                .evaluate(&u, trial, &mut rng, tol)
                .map(|(x, value, bad)| (SuiteRow { trial, n: cfg.n, x, value }, bad))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut res = SuiteResult::new(cfg, SuiteKind::Identity, params);
    let values: Vec<f64> = rows.iter().map(|(r, _)| r.value).collect();
    res.set_stats(&values);
    res.tolerance = Some(tol);
    res.violations = rows.iter().filter(|(_, bad)| *bad).count();
    res.rows = rows.into_iter().map(|(r, _)| r).collect();
    res.passed = cfg.trials > 0 && res.violations == 0;
    Ok(res)
}
