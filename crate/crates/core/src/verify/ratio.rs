use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{hypothesis, trial_rng, ParamReader, SuiteConfig, SuiteKind, SuiteResult, SuiteRow};
use crate::error::Result;
use crate::lorentz::{classical_sobolev_norm, conjugate, sfl_norm, NormSpec};
use crate::sampler::{FieldSampler, SpectrumShape};
use crate::spectral::{to_physical, to_spectral, Grid, SpectralField};

pub const RATIO_SUITES: &[&str] = &["holder", "young", "sobolev", "product", "nesting", "classical"];

const REL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL * a.abs().max(b.abs()).max(1.0)
}

fn check_open(name: &str, x: f64) -> Result<()> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(hypothesis(format!("need 1 < {name} < ∞, got {name} = {x}")));
    }
    Ok(())
}

fn check_fine(name: &str, x: f64) -> Result<()> {
    if !(x >= 1.0) {
        return Err(hypothesis(format!("need 1 <= {name} <= ∞, got {name} = {x}")));
    }
    Ok(())
}

/// How one trial turns two random scalar fields into `LHS / RHS`.
#[derive(Clone, Copy, Debug)]
enum Estimate {
    Holder { q: f64, qt: f64, r: f64, h: f64, ht: f64, hh: f64 },
    Young { q: f64, qt: f64, r: f64, h: f64, ht: f64, hh: f64 },
    Sobolev { q: f64, qt: f64, s: f64, st: f64, r: f64 },
    Product { k: f64, p: f64, q: f64, r: f64 },
    Nesting { p: f64, r: f64, rt: f64, s: f64 },
    Classical { q: f64, s: f64 },
}

fn parse(cfg: &SuiteConfig) -> Result<(Estimate, f64, f64, super::SuiteParams)> {
    let d = cfg.dim as f64;
    let known: &[&str] = match cfg.name.as_str() {
        "holder" | "young" => &["q", "q_tilde", "r", "h", "h_tilde", "h_hat", "slope", "max_drift"],
        "sobolev" => &["q", "q_tilde", "s", "s_tilde", "r", "slope", "max_drift"],
        "product" => &["k", "p", "r", "slope", "max_drift"],
        "nesting" => &["p", "r", "r_tilde", "s", "slope", "max_drift"],
        _ => &["q", "s", "slope", "max_drift"],
    };
    let mut pr = ParamReader::new(&cfg.params, known)?;
    let est = match cfg.name.as_str() {
        "holder" | "young" => {
            let young = cfg.name == "young";
            let (dq, dr) = if young { (4.0 / 3.0, 2.0) } else { (3.0, 1.5) };
            let q = pr.get("q", dq);
            let qt = pr.get("q_tilde", dq);
            let r = pr.get("r", dr);
            let ht = pr.get("h_tilde", 2.0);
            let hh = pr.get("h_hat", 2.0);
            let h = pr.get("h", 1.0);
            for (n, x) in [("r", r), ("q", q), ("q̃", qt)] {
                check_open(n, x)?;
            }
            for (n, x) in [("h", h), ("h̃", ht), ("ĥ", hh)] {
                check_fine(n, x)?;
            }
            if young && !close(1.0 / r + 1.0, 1.0 / q + 1.0 / qt) {
                return Err(hypothesis(format!(
                    "need 1/r + 1 = 1/q + 1/q̃, got {} vs {}",
                    1.0 / r + 1.0,
                    1.0 / q + 1.0 / qt
                )));
            }
            if !young && !close(1.0 / r, 1.0 / q + 1.0 / qt) {
                return Err(hypothesis(format!("need 1/r = 1/q + 1/q̃, got {} vs {}", 1.0 / r, 1.0 / q + 1.0 / qt)));
            }
            if !close(1.0 / h, 1.0 / ht + 1.0 / hh) {
                return Err(hypothesis(format!("need 1/h = 1/h̃ + 1/ĥ, got {} vs {}", 1.0 / h, 1.0 / ht + 1.0 / hh)));
            }
            if young {
                Estimate::Young { q, qt, r, h, ht, hh }
            } else {
                Estimate::Holder { q, qt, r, h, ht, hh }
            }
        }
        "sobolev" => {
            let q = pr.get("q", 2.0);
            let qt = pr.get("q_tilde", 4.0);
            let s = pr.get("s", 0.0);
            let st = pr.get("s_tilde", s - d / q + d / qt);
            let r = pr.get("r", 2.0);
            if !(1.0 < q && q <= qt && qt.is_finite()) {
                return Err(hypothesis(format!("need 1 < q <= q̃ < ∞, got q = {q}, q̃ = {qt}")));
            }
            if !close(s - d / q, st - d / qt) {
                return Err(hypothesis(format!("need s - d/q = s̃ - d/q̃, got {} vs {}", s - d / q, st - d / qt)));
            }
            check_fine("r", r)?;
            Estimate::Sobolev { q, qt, s, st, r }
        }
        "product" => {
            let k = pr.get("k", 1.0);
            let p = pr.get("p", if cfg.dim == 2 { 1.5 } else { 1.8 });
            let r = pr.get("r", 2.0);
            if k.fract() != 0.0 || k < 0.0 || k > d - 1.0 {
                return Err(hypothesis(format!("need an integer 0 <= k <= d - 1, got k = {k}")));
            }
            if !(k / d < 1.0 / p && 1.0 / p < 0.5 + k / (2.0 * d)) {
                return Err(hypothesis(format!(
                    "need k/d < 1/p < 1/2 + k/(2d), got {} < {} < {}",
                    k / d,
                    1.0 / p,
                    0.5 + k / (2.0 * d)
                )));
            }
            check_fine("r", r)?;
            let q = 1.0 / (2.0 / p - k / d);
            Estimate::Product { k, p, q, r }
        }
        "nesting" => {
            let p = pr.get("p", 2.0);
            let r = pr.get("r", 1.0);
            let rt = pr.get("r_tilde", 2.0);
            let s = pr.get("s", 0.0);
            check_fine("p", p)?;
            if !(1.0 <= r && r <= rt) {
                return Err(hypothesis(format!("need 1 <= r <= r̃ <= ∞, got r = {r}, r̃ = {rt}")));
            }
            Estimate::Nesting { p, r, rt, s }
        }
        _ => {
            let q = pr.get("q", 1.5);
            let s = pr.get("s", 0.5);
            if !(1.0 < q && q <= 2.0) {
                return Err(hypothesis(format!("need 1 < q <= 2, got q = {q}")));
            }
            Estimate::Classical { q, s }
        }
    };
    let extra = if let Estimate::Product { k, .. } = est { k } else { 0.0 };
    let slope = pr.get("slope", d / 2.0 + 0.5 + extra);
    let max_drift = pr.get("max_drift", 2.0);
    Ok((est, slope, max_drift, pr.finish()))
}

fn product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let (a, b) = (to_physical(u)?, to_physical(v)?);
    let samples: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut w = to_spectral(u.grid(), 1, &samples)?;
    w.remove_mean();
    Ok(w)
}

/// Torus convolution `∫ u(x - y) v(y) dy`, coefficientwise `L^d û v̂`.
fn convolution(u: &SpectralField, v: &SpectralField) -> SpectralField {
    let g = *u.grid();
    let scale = g.length().powi(g.dim() as i32);
    let coeffs = u.coeffs().iter().zip(v.coeffs()).map(|(a, b)| a * b * scale).collect();
    SpectralField::from_coeffs(g, 1, coeffs).expect("same shape")
}

fn spec(s: f64, p: f64, r: f64) -> Result<NormSpec> {
    NormSpec::new(s, p, r)
}

fn trial_ratio(est: &Estimate, grid: &Grid, slope: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
    let band = grid.n() as i64 / 4 - 1;
    let shape = SpectrumShape { slope, band: Some(band), ..Default::default() };
    let sampler = FieldSampler::new(*grid, 1, shape);
    let u = sampler.sample(rng);
    let v = sampler.sample(rng);
    Ok(match *est {
        Estimate::Holder { q, qt, r, h, ht, hh } => {
            sfl_norm(&product(&u, &v)?, &spec(0.0, r, h)?)?
                / (sfl_norm(&u, &spec(0.0, q, ht)?)? * sfl_norm(&v, &spec(0.0, qt, hh)?)?)
        }
        Estimate::Young { q, qt, r, h, ht, hh } => {
            sfl_norm(&convolution(&u, &v), &spec(0.0, r, h)?)?
                / (sfl_norm(&u, &spec(0.0, q, ht)?)? * sfl_norm(&v, &spec(0.0, qt, hh)?)?)
        }
        Estimate::Sobolev { q, qt, s, st, r } => sfl_norm(&u, &spec(st, qt, r)?)? / sfl_norm(&u, &spec(s, q, r)?)?,
        Estimate::Product { k, p, q, r } => {
            sfl_norm(&product(&u, &v)?, &spec(k, q, r)?)?
                / (sfl_norm(&u, &spec(k, p, r)?)? * sfl_norm(&v, &spec(k, p, r)?)?)
        }
        Estimate::Nesting { p, r, rt, s } => sfl_norm(&u, &spec(s, p, rt)?)? / sfl_norm(&u, &spec(s, p, r)?)?,
        Estimate::Classical { q, s } => sfl_norm(&u, &spec(s, q, conjugate(q))?)? / classical_sobolev_norm(&u, s, q)?,
    })
}

fn ratios_on(est: &Estimate, grid: &Grid, slope: f64, cfg: &SuiteConfig) -> Result<Vec<f64>> {
    (0..cfg.trials).into_par_iter().map(|i| trial_ratio(est, grid, slope, &mut trial_rng(cfg.seed, i))).collect()
}

/// Ratio suite on the configured grid and on its refinement `2n`.
pub fn run_ratio_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let (est, slope, max_drift, params) = parse(cfg)?;
    let coarse = cfg.grid()?;
    let fine = Grid::periodic(cfg.dim, 2 * cfg.n)?;
    let a = ratios_on(&est, &coarse, slope, cfg)?;
    let b = ratios_on(&est, &fine, slope, cfg)?;

    let mut res = SuiteResult::new(cfg, SuiteKind::Ratio, params);
    res.set_stats(&a);
    let max_b = b.iter().copied().fold(f64::NAN, f64::max);
    res.max_refined = Some(max_b);
    let drift = (res.max / max_b).max(max_b / res.max);
    res.drift = Some(drift);
    res.tolerance = Some(max_drift);
    let bad = |x: &f64| !(x.is_finite() && *x > 0.0);
    res.violations = a.iter().filter(|x| bad(x)).count() + b.iter().filter(|x| bad(x)).count();
    for (n, vals) in [(coarse.n(), &a), (fine.n(), &b)] {
        res.rows.extend(vals.iter().enumerate().map(|(trial, &value)| SuiteRow { trial, n, x: n as f64, value }));
    }
    if let Estimate::Classical { .. } = est {
        let above = a.iter().chain(&b).filter(|&&x| x > 1.0 + 1e-10).count();
        if above > 0 {
            res.notes.push(format!("{above} ratios exceed 1, against the Hausdorff-Young direction"));
            res.violations += above;
        }
    }
    res.passed = cfg.trials > 0 && res.violations == 0 && drift <= max_drift;
    Ok(res)
}
