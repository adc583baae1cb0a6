//! Mild solutions `u = e^{tΔ}u₀ - B(u, u)` by Picard iteration over whole
//! trajectories, with the smallness diagnostics that accompany each
//! existence regime.

use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::duhamel::{bilinear_b, graded_times, heat_trajectory, QuadratureRule};
use crate::error::{Error, Result};
use crate::io::initial::{generate_initial_data, InitialData};
use crate::lorentz::{sfl_norm, weighted_sup_norm, NormSpec};
use crate::picard::{estimate_bilinear_bound, solve_quadratic_fixed_point, PicardOptions, PicardReport, Verdict};
use crate::sampler::{FieldSampler, SpectrumShape};
use crate::spectral::{divergence_residual, Grid, SpectralField};
use crate::trajectory::Trajectory;

/// Everything needed to set up one mild-solution run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
    pub t_final: f64,
    pub steps: usize,
    pub gamma: f64,
    pub p: f64,
    pub r: f64,
    /// Auxiliary exponent `p̃` (unused when `p = 1`).
    pub p_tilde: f64,
    /// Auxiliary regularity for `p = 1`, `d - 1 < s_aux < d`.
    pub s_aux: Option<f64>,
    pub initial: InitialData,
    pub tol: f64,
    pub max_iter: usize,
    /// Unit-pair samples used to estimate `η̂`; 0 disables the estimate.
    pub eta_trials: usize,
    pub seed: u64,
    /// The weighted norm at `t_1` must stay below this fraction of its sup.
    pub t0_fraction: f64,
    pub tol_exact: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            n: 32,
            length: 2.0 * std::f64::consts::PI,
            t_final: 0.5,
            steps: 64,
            gamma: 2.0,
            p: 2.0,
            r: 2.0,
            p_tilde: 3.0,
            s_aux: None,
            initial: InitialData::TaylorGreen { amp: 1.0 },
            tol: 1e-10,
            max_iter: 50,
            eta_trials: 4,
            seed: 0,
            t0_fraction: 0.5,
            tol_exact: crate::spectral::DEFAULT_TOL_EXACT,
        }
    }
}

/// Norms and weight implied by a validated configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Regime {
    pub name: &'static str,
    /// Critical norm `Ḣ^{d/p-1}_{𝓛^{p,r}}`.
    pub critical: NormSpec,
    /// Norm inside the auxiliary time-weighted space.
    pub auxiliary: NormSpec,
    pub alpha: f64,
    /// Time weight exponent `α/2`.
    pub weight_exp: f64,
}

fn invalid(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.length).map_err(|e| match e {
            Error::Argument(m) => invalid(m),
            other => other,
        })
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        graded_times(self.t_final, self.steps, self.gamma).map_err(|e| match e {
            Error::Argument(m) => invalid(m),
            other => other,
        })
    }

    /// Check the exponent hypotheses and derive the norms of the run.
    pub fn regime(&self) -> Result<Regime> {
        let d = self.dim as f64;
        let (p, r, pt) = (self.p, self.r, self.p_tilde);
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid(format!("need 1 <= p < ∞, got p = {p}")));
        }
        if !(r >= 1.0 && r.is_finite()) {
            return Err(invalid(format!("need 1 <= r < ∞, got r = {r}")));
        }
        let critical_s = d / p - 1.0;

        if p == 1.0 {
            let s = self
                .s_aux
                .ok_or_else(|| invalid("p = 1 needs an auxiliary regularity s_aux with d - 1 < s_aux < d".into()))?;
            if !(d - 1.0 < s && s < d) {
                return Err(invalid(format!("need d - 1 < s_aux < d, got s_aux = {s} with d = {}", self.dim)));
            }
            let alpha = s + 1.0 - d;
            return Ok(Regime {
                name: "p = 1",
                critical: NormSpec::new(critical_s, 1.0, r)?.with_sup_surrogate(true),
                auxiliary: NormSpec::new(s, 1.0, f64::INFINITY)?,
                alpha,
                weight_exp: alpha / 2.0,
            });
        }

        if !(pt > 1.0 && pt.is_finite()) {
            return Err(invalid(format!("need 1 < p̃ < ∞, got p̃ = {pt}")));
        }
        let critical = NormSpec::new(critical_s, p, r)?;
        let mut window_error = None;
        if p <= d {
            let m = (d / p).floor();
            let lower = 1.0 / (2.0 * p) + (m - 1.0) / (2.0 * d);
            let upper = (m / d).min(0.5 + (m - 1.0) / (2.0 * d));
            let inv = 1.0 / pt;
            if lower < inv && inv < upper {
                let alpha = m - d / pt;
                return Ok(Regime {
                    name: "1 < p <= d",
                    critical,
                    auxiliary: NormSpec::new(m - 1.0, pt, f64::INFINITY)?,
                    alpha,
                    weight_exp: alpha / 2.0,
                });
            }
            window_error = Some(format!(
                "p̃ window violated: need 1/(2p) + ([d/p]-1)/(2d) < 1/p̃ < min{{[d/p]/d, 1/2 + ([d/p]-1)/(2d)}}, \
                 i.e. {lower} < {inv} < {upper}"
            ));
        }
        if p >= d {
            if pt > p {
                let alpha = 1.0 - d / pt;
                return Ok(Regime {
                    name: "p >= d",
                    critical,
                    auxiliary: NormSpec::new(0.0, pt, f64::INFINITY)?,
                    alpha,
                    weight_exp: alpha / 2.0,
                });
            }
            let msg = format!("p̃ window violated: need p̃ > p, got p̃ = {pt}, p = {p}");
            window_error = Some(match window_error {
                Some(first) => format!("{first}; or {msg}"),
                None => msg,
            });
        }
        Err(invalid(window_error.expect("one regime applies")))
    }

    pub fn validate(&self) -> Result<Regime> {
        self.grid()?;
        self.times()?;
        if !(self.tol > 0.0) {
            return Err(invalid(format!("picard tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(invalid("picard max_iter must be at least 1".into()));
        }
        if !(self.t0_fraction > 0.0 && self.t0_fraction <= 1.0) {
            return Err(invalid(format!("t0 fraction must lie in (0, 1], got {}", self.t0_fraction)));
        }
        if !(self.tol_exact > 0.0) {
            return Err(invalid(format!("tol_exact must be positive, got {}", self.tol_exact)));
        }
        self.regime()
    }
}

/// `sup_t t^w ‖e^{tΔ}u₀‖` on the given time grid.
pub fn caloric_smallness(u0: &SpectralField, aux: &NormSpec, weight_exp: f64, times: &[f64]) -> Result<f64> {
    Ok(weighted_sup_norm(&heat_trajectory(u0, times)?, aux, weight_exp)?.value)
}

fn finite_field(f: &SpectralField) -> bool {
    f.coeffs().iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Weighted sup norm that reports `+∞` instead of failing on non-finite data.
fn k_norm(traj: &Trajectory, aux: &NormSpec, weight_exp: f64) -> Result<f64> {
    if !traj.fields().iter().all(finite_field) {
        return Ok(f64::INFINITY);
    }
    Ok(weighted_sup_norm(traj, aux, weight_exp)?.value)
}

fn norm_or_inf(f: &SpectralField, spec: &NormSpec) -> Result<f64> {
    if finite_field(f) {
        sfl_norm(f, spec)
    } else {
        Ok(f64::INFINITY)
    }
}

/// `η̂` for the Duhamel operator in the auxiliary space, probed with heat
/// flows of random divergence-free data.
pub fn estimate_nse_eta(grid: &Grid, times: &[f64], regime: &Regime, trials: usize, seed: u64) -> Result<f64> {
    let rule = QuadratureRule::default();
    let shape =
        SpectrumShape { slope: 1.0, band: Some(grid.dealias_cutoff()), divergence_free: true, ..Default::default() };
    let sampler = FieldSampler::new(*grid, grid.dim(), shape);
    let est = estimate_bilinear_bound(
        |u: &Trajectory, v: &Trajectory| bilinear_b(u, v, &rule),
        |x: &Trajectory| k_norm(x, &regime.auxiliary, regime.weight_exp),
        |rng: &mut ChaCha8Rng| heat_trajectory(&sampler.sample(rng), times),
        trials,
        seed,
    )?;
    Ok(est.eta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub weighted_norm: f64,
    pub critical_norm: f64,
    pub div_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub config: RunConfig,
    pub regime: Regime,
    pub picard: PicardReport,
    pub verdict: Verdict,
    /// `sup_t t^{α/2} ‖e^{tΔ}u₀‖` in the auxiliary norm.
    pub caloric_smallness: f64,
    pub eta_hat: Option<f64>,
    /// `1/(4η̂)`.
    pub threshold: Option<f64>,
    pub below_threshold: Option<bool>,
    /// Weighted norm at the first positive time divided by its sup.
    pub early_time_ratio: f64,
    pub early_time_ok: bool,
    /// `‖u - e^{tΔ}u₀ + B(u, u)‖` in the auxiliary space.
    pub mild_residual: f64,
    /// `max_i ‖u(t_i) - e^{t_iΔ}u₀‖ / ‖e^{t_iΔ}u₀‖` in coefficient `ℓ²`.
    pub heat_deviation: f64,
    pub critical_sup: f64,
    pub max_div_residual: f64,
    /// Time of the largest weighted norm of the last iterate when the
    /// iteration diverged.
    pub blowup_time: Option<f64>,
    /// Kept out of serialized reports so that output files are reproducible.
    #[serde(skip)]
    pub wall_time_s: f64,
    pub table: Vec<TrajectoryRow>,
}

/// Solve from the configured initial data.
pub fn run_mild_solution(cfg: &RunConfig) -> Result<(Trajectory, SolveReport)> {
    let grid = cfg.grid()?;
    let u0 = generate_initial_data(&grid, &cfg.initial)?;
    run_mild_solution_from(cfg, &u0)
}

/// Solve from an explicit initial field.
pub fn run_mild_solution_from(cfg: &RunConfig, u0: &SpectralField) -> Result<(Trajectory, SolveReport)> {
    let start = Instant::now();
    let regime = cfg.validate()?;
    let grid = cfg.grid()?;
    if *u0.grid() != grid || u0.components() != grid.dim() {
        return Err(Error::arg("initial field does not match the configured grid"));
    }
    if !u0.is_mean_zero() {
        return Err(Error::domain("initial data must be mean-zero"));
    }
    let div0 = divergence_residual(u0)?;
    if div0 > cfg.tol_exact {
        return Err(Error::domain(format!("initial data is not divergence-free (residual {div0:e})")));
    }
    let times = cfg.times()?;
    let rule = QuadratureRule::default();
    let y = heat_trajectory(u0, &times)?.with_monitor(regime.auxiliary);
    let caloric = k_norm(&y, &regime.auxiliary, regime.weight_exp)?;

    let eta_hat = if cfg.eta_trials > 0 {
        Some(estimate_nse_eta(&grid, &times, &regime, cfg.eta_trials, cfg.seed)?)
    } else {
        None
    };

    let opts = PicardOptions { eta: eta_hat, tol: cfg.tol, max_iter: cfg.max_iter, ..Default::default() };
    let (u, picard) = solve_quadratic_fixed_point(
        &y,
        |a: &Trajectory, b: &Trajectory| bilinear_b(a, b, &rule),
        |x: &Trajectory| k_norm(x, &regime.auxiliary, regime.weight_exp),
        &opts,
    )?;

    let table = u
        .fields()
        .par_iter()
        .zip(&times)
        .map(|(f, &t)| {
            let aux = norm_or_inf(f, &regime.auxiliary)?;
            let weighted = if t > 0.0 { t.powf(regime.weight_exp) * aux } else { 0.0 };
            Ok(TrajectoryRow {
                t,
                weighted_norm: weighted,
                critical_norm: norm_or_inf(f, &regime.critical)?,
                div_residual: if finite_field(f) { divergence_residual(f)? } else { f64::NAN },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let sup = table.iter().map(|r| r.weighted_norm).fold(0.0, f64::max);
    let early = table.iter().find(|r| r.t > 0.0).map(|r| r.weighted_norm).unwrap_or(0.0);
    let early_time_ratio = if sup > 0.0 { early / sup } else { 0.0 };
    let heat_deviation = u
        .fields()
        .iter()
        .zip(y.fields())
        .map(|(a, b)| {
            let scale = b.l2_coeff_norm();
            let diff = a.sub(b).map(|d| d.l2_coeff_norm()).unwrap_or(f64::INFINITY);
            if scale > 0.0 {
                diff / scale
            } else {
                diff
            }
        })
        .fold(0.0, f64::max);
    let blowup_time = (picard.verdict == Verdict::Diverged).then(|| {
        table
            .iter()
            .filter(|r| !r.weighted_norm.is_nan())
            .max_by(|a, b| a.weighted_norm.total_cmp(&b.weighted_norm))
            .map(|r| r.t)
            .unwrap_or(cfg.t_final)
    });

    let threshold = eta_hat.map(|e| if e > 0.0 { 0.25 / e } else { f64::INFINITY });
    let report = SolveReport {
        config: cfg.clone(),
        regime,
        verdict: picard.verdict,
        caloric_smallness: caloric,
        eta_hat,
        threshold,
        below_threshold: threshold.map(|t| caloric <= t),
        early_time_ratio,
        early_time_ok: early_time_ratio < cfg.t0_fraction,
        mild_residual: picard.residual,
        heat_deviation,
        critical_sup: table.iter().map(|r| r.critical_norm).fold(0.0, f64::max),
        max_div_residual: table.iter().map(|r| r.div_residual).fold(0.0, f64::max),
        blowup_time,
        wall_time_s: start.elapsed().as_secs_f64(),
        table,
        picard,
    };
    Ok((u, report))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub amplitude: f64,
    pub verdict: Verdict,
    pub iterations: usize,
    /// First contraction ratio `‖x_2 - x_1‖ / ‖x_1 - x_0‖` (0 if undefined).
    pub contraction_ratio: f64,
    pub caloric_smallness: f64,
    pub max_div_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
    pub eta_hat: Option<f64>,
    /// Contraction ratios are nondecreasing in the amplitude.
    pub monotone: bool,
    pub any_converged: bool,
    pub any_failed: bool,
}

/// Re-run `cfg` with its initial data rescaled to each amplitude. Runs are
/// independent and execute concurrently.
pub fn amplitude_sweep(cfg: &RunConfig, amplitudes: &[f64]) -> Result<SweepReport> {
    let mut base = cfg.clone();
    base.validate()?;
    let grid = base.grid()?;
    let times = base.times()?;
    let regime = base.regime()?;
    let eta_hat = if base.eta_trials > 0 {
        Some(estimate_nse_eta(&grid, &times, &regime, base.eta_trials, base.seed)?)
    } else {
        None
    };
    base.eta_trials = 0;
    let points = amplitudes
        .par_iter()
        .map(|&amp| {
            let mut c = base.clone();
            c.initial = base.initial.with_amp(amp);
            let (_, rep) = run_mild_solution(&c)?;
            Ok(SweepPoint {
                amplitude: amp,
                verdict: rep.verdict,
                iterations: rep.picard.iterations,
                contraction_ratio: rep.picard.ratios.first().copied().unwrap_or(0.0),
                caloric_smallness: rep.caloric_smallness,
                max_div_residual: rep.max_div_residual,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone =
        points.windows(2).all(|w| w[0].amplitude > w[1].amplitude || w[1].contraction_ratio >= w[0].contraction_ratio);
    Ok(SweepReport {
        monotone,
        any_converged: points.iter().any(|p| p.verdict == Verdict::Converged),
        any_failed: points.iter().any(|p| p.verdict != Verdict::Converged),
        points,
        eta_hat,
    })
}

/// Reproducible random divergence-free field for probing the solver.
pub fn random_divfree(grid: &Grid, slope: f64, amp: f64, seed: u64) -> Result<SpectralField> {
    generate_initial_data(grid, &InitialData::RandomDivfree { slope, amp, seed, band: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duhamel::heat_evolve;
    use num_complex::Complex64;

    #[test]
    fn default_regime() {
        let r = RunConfig::default().regime().unwrap();
        assert!((r.alpha - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.auxiliary.s, 0.0);
        assert_eq!(r.critical.s, 0.0);
    }

    #[test]
    fn window_violations_name_the_inequality() {
        let cfg = RunConfig { p_tilde: 1.5, ..Default::default() };
        let err = cfg.regime().unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(ref m) if m.contains("1/p̃")), "{err}");
        let cfg = RunConfig { p: 3.0, p_tilde: 2.5, ..Default::default() };
        assert!(matches!(cfg.regime().unwrap_err(), Error::InvalidConfig(ref m) if m.contains("p̃ > p")));
        let cfg = RunConfig { p: 1.0, s_aux: Some(2.5), ..Default::default() };
        assert!(matches!(cfg.regime().unwrap_err(), Error::InvalidConfig(ref m) if m.contains("d - 1 < s_aux < d")));
        assert!(RunConfig { r: f64::INFINITY, ..Default::default() }.regime().is_err());
    }

    #[test]
    fn other_regimes() {
        let r = RunConfig { p: 3.0, p_tilde: 4.0, ..Default::default() }.regime().unwrap();
        assert!((r.alpha - 0.5).abs() < 1e-15);
        let r = RunConfig { p: 2.0, p_tilde: 3.0, dim: 2, ..Default::default() }.regime().unwrap();
        assert_eq!(r.name, "1 < p <= d");
        let r = RunConfig { p: 2.0, p_tilde: 5.0, ..Default::default() }.regime().unwrap();
        assert_eq!(r.name, "p >= d");
        let r = RunConfig { p: 1.0, r: 1.0, s_aux: Some(1.5), ..Default::default() }.regime().unwrap();
        assert!((r.alpha - 0.5).abs() < 1e-15);
        assert!(r.critical.sup_surrogate);
    }

    #[test]
    fn caloric_single_mode_closed_form() {
        let g = Grid::periodic(2, 16).unwrap();
        let mut u0 = SpectralField::zeros(g, 2);
        // |ξ|² = 4 along the second axis, first component: divergence-free
        u0.set(0, &[0, 2], Complex64::new(0.5, 0.0));
        u0.set(0, &[0, -2], Complex64::new(0.5, 0.0));
        let aux = NormSpec::new(0.0, 3.0, f64::INFINITY).unwrap();
        let w = 1.0 / 6.0;
        let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 1e-4).collect();
        let got = caloric_smallness(&u0, &aux, w, &times).unwrap();
        // profile: one step of height c·density over measure 2
        let c = 0.5 * g.density_factor();
        let q: f64 = 1.5;
        let profile = 2.0f64.powf(1.0 / q) * c;
        let lam = 4.0;
        let want = (w / lam).powf(w) * (-w).exp() * profile;
        assert!((got - want).abs() < 1e-6 * want, "{got} vs {want}");
        assert_eq!(caloric_smallness(&SpectralField::zeros(g, 2), &aux, w, &times).unwrap(), 0.0);
        let scaled = caloric_smallness(&u0.scaled(3.0), &aux, w, &times).unwrap();
        assert!((scaled - 3.0 * got).abs() <= 1e-12 * scaled);
    }

    #[test]
    fn zero_data_converges_to_zero() {
        let cfg = RunConfig { initial: InitialData::Zero, steps: 8, eta_trials: 0, ..Default::default() };
        let (u, rep) = run_mild_solution(&cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Converged);
        assert!(u.fields().iter().all(|f| f.max_abs() == 0.0));
    }

    #[test]
    fn taylor_green_is_heat_flow() {
        let cfg = RunConfig { eta_trials: 1, ..Default::default() };
        let (u, rep) = run_mild_solution(&cfg).unwrap();
        assert_eq!(rep.verdict, Verdict::Converged);
        assert!(rep.picard.iterations <= 2);
        assert!(rep.heat_deviation <= 1e-8);
        assert!(rep.max_div_residual <= 1e-10);
        let u0 = generate_initial_data(&cfg.grid().unwrap(), &cfg.initial).unwrap();
        for (t, f) in u.iter() {
            let exact = u0.scaled((-2.0 * t).exp());
            assert!(f.sub(&exact).unwrap().max_abs() <= 1e-8 * u0.max_abs());
            assert!(f.sub(&heat_evolve(&u0, t).unwrap()).unwrap().max_abs() <= 1e-8);
        }
        assert!(rep.early_time_ok);
        assert_eq!(rep.table.len(), 65);
    }

    #[test]
    fn rejects_bad_initial_data() {
        let cfg = RunConfig { eta_trials: 0, steps: 4, ..Default::default() };
        let g = cfg.grid().unwrap();
        let mut u0 = SpectralField::zeros(g, 2);
        u0.set(0, &[1, 0], Complex64::new(0.5, 0.0));
        u0.set(0, &[-1, 0], Complex64::new(0.5, 0.0));
        assert!(matches!(run_mild_solution_from(&cfg, &u0), Err(Error::Domain(_))));
    }
}
