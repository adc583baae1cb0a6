use rayon::prelude::*;

use super::quadrature::{fit_slope, tanh_sinh};
use super::{hypothesis, trial_rng, ParamReader, SuiteConfig, SuiteKind, SuiteParams, SuiteResult, SuiteRow};
use crate::error::Result;
use crate::lorentz::{lorentz_norm, rearrange, Atom};
use crate::sampler::{FieldSampler, SpectrumShape};
use crate::spectral::Grid;

/// `‖1_{|ξ| > R} f‖_{L^{q,r}}` for each radius, from `(|ξ|, value, measure)` atoms.
fn tail_norms(atoms: &[(f64, f64, f64)], radii: &[f64], q: f64, r: f64) -> Result<Vec<f64>> {
    radii
        .iter()
        .map(|&radius| {
            let kept: Vec<Atom> = atoms.iter().filter(|a| a.0 > radius).map(|a| Atom::new(a.1, a.2)).collect();
            lorentz_norm(&rearrange(&kept)?, q, r)
        })
        .collect()
}

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 4.0 / 3.0 * std::f64::consts::PI,
    }
}

/// Continuum `‖1_{R<|ξ|<R_max} |ξ|^{-a}‖_{L^{q,r}(ℝ^d)}` by quadrature of
/// `f*(t) = (t/ω + R^d)^{-a/d}`, `t < ω(R_max^d - R^d)`.
pub(crate) fn annulus_tail(d: usize, a: f64, q: f64, r: f64, radius: f64, r_max: f64) -> f64 {
    let w = unit_ball_volume(d);
    let di = d as f64;
    let top = w * (r_max.powf(di) - radius.powf(di));
    if top <= 0.0 {
        return 0.0;
    }
    let beta = r / q;
    let integral =
        tanh_sinh(0.0, top, 1e-12, |t, left, _| left.powf(beta - 1.0) * (t / w + radius.powf(di)).powf(-a * r / di));
    integral.powf(1.0 / r)
}

/// Truncated-tail norms of random band-limited data over nested radii, plus
/// the decay rate of a heavy-tailed profile against its continuum value.
pub fn run_tail_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let d = cfg.dim as f64;
    let mut pr = ParamReader::new(&cfg.params, &["q", "r", "slope", "band", "heavy_a", "fit_min", "fit_max", "tol"])?;
    let q = pr.get("q", 2.0);
    let r = pr.get("r", 2.0);
    if !(q >= 1.0 && r >= 1.0 && r.is_finite()) {
        return Err(hypothesis(format!("need q >= 1 and 1 <= r < ∞ for vanishing tails, got q = {q}, r = {r}")));
    }
    let slope = pr.get("slope", d / 2.0 + 0.5);
    let grid: Grid = cfg.grid()?;
    let band = pr.get("band", (cfg.n / 4) as f64) as i64;
    let heavy_a = pr.get("heavy_a", 3.0);
    let r_max = (cfg.n / 2 - 1) as f64;
    let fit_min = pr.get("fit_min", 3.0);
    let fit_max = pr.get("fit_max", r_max / 3.0);
    let tol = pr.get("tol", 0.05);
    if !(heavy_a * q > d) {
        return Err(hypothesis(format!("need a·q > d for a decaying heavy tail, got a = {heavy_a}")));
    }
    if !(0.0 < fit_min && fit_min < fit_max && fit_max < r_max) {
        return Err(hypothesis(format!("need 0 < fit_min < fit_max < n/2 - 1, got [{fit_min}, {fit_max}]")));
    }

    let radii: Vec<f64> = (0..=((band as f64) * d.sqrt()).ceil() as usize + 1).map(|k| k as f64).collect();
    let sampler = FieldSampler::new(grid, 1, SpectrumShape { slope, band: Some(band), ..Default::default() });
    let density = grid.density_factor();
    let mu = grid.cell_measure_xi();
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let u = sampler.sample(&mut trial_rng(cfg.seed, trial));
            let atoms: Vec<(f64, f64, f64)> = (1..grid.modes())
                .map(|flat| (grid.xi_norm2(flat).sqrt(), u.coeffs()[flat].norm() * density, mu))
                .filter(|a| a.1 > 0.0)
                .collect();
            tail_norms(&atoms, &radii, q, r).map(|tails| (trial, tails))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut res = SuiteResult::new(cfg, SuiteKind::Tail, SuiteParams::new());
    let mut rows = Vec::new();
    for (trial, tails) in &per_trial {
        let increasing = tails.windows(2).filter(|w| w[1] > w[0] * (1.0 + 1e-12)).count();
        let terminal = *tails.last().expect("radii are nonempty") == 0.0;
        if increasing > 0 || !terminal {
            res.violations += 1;
            res.notes.push(format!("trial {trial}: {increasing} increases, terminal zero = {terminal}"));
        }
        rows.extend(radii.iter().zip(tails).map(|(&x, &value)| SuiteRow { trial: *trial, n: cfg.n, x, value }));
    }

    // heavy tail |ξ|^{-a} inside |ξ| < R_max
    let heavy: Vec<(f64, f64, f64)> = (1..grid.modes())
        .map(|flat| grid.xi_norm2(flat).sqrt())
        .filter(|&k| k < r_max)
        .map(|k| (k, k.powf(-heavy_a), mu))
        .collect();
    let fit_radii: Vec<f64> = super::exponent::log_space(fit_min, fit_max, 9);
    let discrete = tail_norms(&heavy, &fit_radii, q, r)?;
    let continuum: Vec<f64> = fit_radii.iter().map(|&k| annulus_tail(cfg.dim, heavy_a, q, r, k, r_max)).collect();
    let fitted = fit_slope(&fit_radii, &discrete);
    let target = fit_slope(&fit_radii, &continuum);
    rows.extend(fit_radii.iter().zip(&discrete).map(|(&x, &value)| SuiteRow { trial: usize::MAX, n: cfg.n, x, value }));
    res.notes.push(format!("heavy tail a = {heavy_a}: whole-space rate -a + d/q = {}", -heavy_a + d / q));
    if !((fitted - target).abs() <= tol) {
        res.violations += 1;
    }

    let values: Vec<f64> = per_trial.iter().map(|(_, t)| t[0]).collect();
    res.set_stats(&values);
    res.fitted_exponent = Some(fitted);
    res.target = Some(target);
    res.tolerance = Some(tol);
    res.rows = rows;
    res.params = pr.finish();
    res.passed = cfg.trials > 0 && res.violations == 0;
    Ok(res)
}
