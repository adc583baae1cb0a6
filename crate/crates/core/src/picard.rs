//! Fixed-point iteration for `x = y - B(x, x)` with `B` bilinear and
//! `‖B(x, z)‖ ≤ η ‖x‖ ‖z‖`: for `‖y‖ ≤ 1/(4η)` the iteration converges to
//! the unique solution with `‖x‖ ≤ 1/(2η)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trajectory::Trajectory;

/// The operations the iteration needs from its state space.
pub trait VectorSpace: Clone {
    fn sub(&self, other: &Self) -> Result<Self>;
    fn scale(&self, factor: f64) -> Self;
}

impl VectorSpace for f64 {
    fn sub(&self, other: &Self) -> Result<Self> {
        Ok(self - other)
    }

    fn scale(&self, factor: f64) -> Self {
        self * factor
    }
}

impl VectorSpace for Trajectory {
    fn sub(&self, other: &Self) -> Result<Self> {
        Trajectory::sub(self, other)
    }

    fn scale(&self, factor: f64) -> Self {
        self.scaled(factor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverged,
    MaxIter,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Diverged => "diverged",
            Verdict::MaxIter => "max_iter",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardOptions {
    /// Bilinear bound `η`, if known; enables the threshold verdicts.
    pub eta: Option<f64>,
    /// Stop when `‖x_{k+1} - x_k‖ ≤ tol · max(1, ‖y‖)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Consecutive expanding steps that count as divergence.
    pub divergence_streak: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self { eta: None, tol: 1e-10, max_iter: 100, divergence_streak: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PicardReport {
    /// `‖x_k‖` for `k = 0..`, starting with `x_0 = y`.
    pub norms: Vec<f64>,
    /// `‖x_{k+1} - x_k‖`.
    pub diffs: Vec<f64>,
    /// `ρ_k = diffs[k] / diffs[k-1]`, for `k ≥ 1` with a nonzero denominator.
    pub ratios: Vec<f64>,
    pub eta: Option<f64>,
    pub y_norm: f64,
    pub verdict: Verdict,
    pub iterations: usize,
    pub final_norm: f64,
    /// `‖x - y + B(x, x)‖` for the returned iterate.
    pub residual: f64,
    /// `‖y‖ ≤ 1/(4η)`.
    pub threshold_check: Option<bool>,
    /// `‖x‖ ≤ 1/(2η)`.
    pub bound_check: Option<bool>,
    /// Iteration at which divergence was declared or a norm became non-finite.
    pub blowup_index: Option<usize>,
}

impl PicardReport {
    pub fn converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios.iter().copied().reduce(f64::max)
    }
}

/// Iterate `x_{k+1} = y - B(x_k, x_k)` from `x_0 = y`.
pub fn solve_quadratic_fixed_point<X, B, N>(
    y: &X,
    mut bilinear: B,
    mut norm: N,
    opts: &PicardOptions,
) -> Result<(X, PicardReport)>
where
    X: VectorSpace,
    B: FnMut(&X, &X) -> Result<X>,
    N: FnMut(&X) -> Result<f64>,
{
    if !(opts.tol > 0.0) {
        return Err(Error::arg(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if let Some(eta) = opts.eta {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::arg(format!("bilinear bound must be finite and >= 0, got {eta}")));
        }
    }
    let y_norm = norm(y)?;
    if !y_norm.is_finite() {
        return Err(Error::arg("the free term must have a finite norm"));
    }
    let stop = opts.tol * y_norm.max(1.0);

    let mut x = y.clone();
    let mut norms = vec![y_norm];
    let mut diffs: Vec<f64> = Vec::new();
    let mut ratios = Vec::new();
    let mut verdict = Verdict::MaxIter;
    let mut blowup_index = None;
    let mut streak = 0;

    for k in 0..opts.max_iter {
        let next = y.sub(&bilinear(&x, &x)?)?;
        let diff = norm(&next.sub(&x)?)?;
        let next_norm = norm(&next)?;
        norms.push(next_norm);
        diffs.push(diff);
        x = next;
        let index = k + 1;
        if !diff.is_finite() || !next_norm.is_finite() {
            verdict = Verdict::Diverged;
            blowup_index = Some(index);
            break;
        }
        if let Some(&prev) = diffs.iter().rev().nth(1) {
            if prev > 0.0 {
                let rho = diff / prev;
                ratios.push(rho);
                streak = if rho >= 1.0 && diff > prev { streak + 1 } else { 0 };
            }
        }
        if diff <= stop {
            verdict = Verdict::Converged;
            break;
        }
        if streak >= opts.divergence_streak {
            verdict = Verdict::Diverged;
            blowup_index = Some(index);
            break;
        }
    }

    let final_norm = *norms.last().expect("at least the initial norm");
    let residual = if final_norm.is_finite() {
        let b = bilinear(&x, &x)?;
        norm(&x.sub(y)?.sub(&b.scale(-1.0))?)?
    } else {
        f64::INFINITY
    };
    let report = PicardReport {
        iterations: diffs.len(),
        norms,
        diffs,
        ratios,
        eta: opts.eta,
        y_norm,
        verdict,
        final_norm,
        residual,
        threshold_check: opts.eta.map(|eta| eta * y_norm <= 0.25),
        bound_check: opts.eta.map(|eta| eta * final_norm <= 0.5),
        blowup_index,
    };
    if report.threshold_check == Some(true) && !report.converged() {
        log::warn!("small-data iteration did not converge: {}", report.verdict);
    }
    Ok((x, report))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundEstimate {
    /// `max ‖B(u, v)‖` over sampled unit-norm pairs.
    pub eta: f64,
    pub trials: usize,
    /// Samples discarded because their norm was zero or not finite.
    pub skipped: usize,
}

/// Empirical bilinear bound: draws `trials` pairs from `sampler`, normalises
/// each element and records the largest `‖B(u, v)‖`.
pub fn estimate_bilinear_bound<X, B, N, S>(
    mut bilinear: B,
    mut norm: N,
    mut sampler: S,
    trials: usize,
    seed: u64,
) -> Result<BoundEstimate>
where
    X: VectorSpace,
    B: FnMut(&X, &X) -> Result<X>,
    N: FnMut(&X) -> Result<f64>,
    S: FnMut(&mut ChaCha8Rng) -> Result<X>,
{
    if trials == 0 {
        return Err(Error::arg("bound estimation needs at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eta = 0.0f64;
    let mut skipped = 0;
    for _ in 0..trials {
        let u = sampler(&mut rng)?;
        let v = sampler(&mut rng)?;
        let (nu, nv) = (norm(&u)?, norm(&v)?);
        if !(nu > 0.0 && nu.is_finite() && nv > 0.0 && nv.is_finite()) {
            skipped += 1;
            continue;
        }
        let value = norm(&bilinear(&u.scale(1.0 / nu), &v.scale(1.0 / nv))?)?;
        eta = eta.max(value);
    }
    Ok(BoundEstimate { eta, trials, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn square(x: &f64, z: &f64) -> Result<f64> {
        Ok(x * z)
    }

    fn abs(x: &f64) -> Result<f64> {
        Ok(x.abs())
    }

    /// Root of `x + η x² = y` nearest zero, without cancellation.
    fn root(y: f64, eta: f64) -> f64 {
        2.0 * y / (1.0 + (1.0 + 4.0 * eta * y).sqrt())
    }

    fn opts(eta: f64) -> PicardOptions {
        PicardOptions { eta: Some(eta), tol: 1e-15, max_iter: 10_000, ..Default::default() }
    }

    #[test]
    fn zero_data() {
        let (x, rep) = solve_quadratic_fixed_point(&0.0, square, abs, &opts(1.0)).unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged());
    }

    #[test]
    fn eighth() {
        let (x, rep) = solve_quadratic_fixed_point(&0.125, square, abs, &opts(1.0)).unwrap();
        assert!((x - (-1.0 + 1.5f64.sqrt()) / 2.0).abs() <= 1e-12);
        assert!((x - 0.1123724357).abs() < 1e-10);
        assert_eq!(rep.threshold_check, Some(true));
        assert_eq!(rep.bound_check, Some(true));
        assert!(rep.residual <= 2e-15);
    }

    #[test]
    fn boundary_quarter() {
        let (x, rep) = solve_quadratic_fixed_point(&0.25, square, abs, &opts(1.0)).unwrap();
        assert!(rep.converged());
        assert!((x - (2.0f64.sqrt() - 1.0) / 2.0).abs() <= 1e-12);
        assert!(x <= 0.5);
    }

    #[test]
    fn large_data_diverges() {
        let (_, rep) = solve_quadratic_fixed_point(&3.0, square, abs, &opts(1.0)).unwrap();
        assert_eq!(rep.verdict, Verdict::Diverged);
        assert!(rep.blowup_index.is_some());
        assert_eq!(rep.threshold_check, Some(false));
    }

    #[test]
    fn non_finite_norm_reports_index() {
        let b = |x: &f64, z: &f64| Ok(if *x > 1.0 { f64::INFINITY } else { x * z * 10.0 });
        let o = PicardOptions { divergence_streak: 100, ..Default::default() };
        let (_, rep) = solve_quadratic_fixed_point(&-0.5, b, abs, &o).unwrap();
        assert_eq!(rep.verdict, Verdict::Diverged);
        let k = rep.blowup_index.unwrap();
        assert!(!rep.norms[k].is_finite());
    }

    #[test]
    fn max_iter_verdict() {
        let o = PicardOptions { max_iter: 3, tol: 1e-15, ..Default::default() };
        let (_, rep) = solve_quadratic_fixed_point(&0.2, square, abs, &o).unwrap();
        assert_eq!(rep.verdict, Verdict::MaxIter);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn deterministic_reports() {
        let a = solve_quadratic_fixed_point(&0.1, square, abs, &opts(2.0)).unwrap();
        let b = solve_quadratic_fixed_point(&0.1, square, abs, &opts(2.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bound_estimates() {
        let sampler = |rng: &mut ChaCha8Rng| Ok(rng.random_range(-3.0..3.0));
        let est = estimate_bilinear_bound(square, abs, sampler, 20, 1).unwrap();
        assert_eq!(est.eta, 1.0);
        let zero = |_: &f64, _: &f64| Ok(0.0);
        assert_eq!(estimate_bilinear_bound(zero, abs, sampler, 5, 1).unwrap().eta, 0.0);
        let degenerate = |_: &mut ChaCha8Rng| Ok(0.0);
        let est = estimate_bilinear_bound(square, abs, degenerate, 4, 1).unwrap();
        assert_eq!(est.skipped, 4);
        assert!(estimate_bilinear_bound(square, abs, sampler, 0, 1).is_err());
    }

    proptest! {
        #[test]
        fn small_ball_converges(frac in -0.98f64..1.0, eta in 0.1f64..10.0) {
            let y = frac / (4.0 * eta);
            let b = move |x: &f64, z: &f64| Ok(eta * x * z);
            let (x, rep) = solve_quadratic_fixed_point(&y, b, abs, &opts(eta)).unwrap();
            prop_assert!(rep.converged());
            prop_assert!((x - root(y, eta)).abs() <= 1e-12 * (1.0 / eta).max(1.0));
            prop_assert!(x.abs() <= 0.5 / eta);
            prop_assert!(rep.residual <= 2.0 * 1e-15 * y.abs().max(1.0));
        }
    }
}
