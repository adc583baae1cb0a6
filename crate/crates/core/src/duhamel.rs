//! Heat evolution, the dealiased tensor product and the bilinear Duhamel
//! operator `B(u,v)(t) = ∫_0^t e^{(t-τ)Δ} ℙ∇·(u⊗v)(τ) dτ`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lorentz::{conjugate, lorentz_norm, rearrange, Atom};
use crate::spectral::{
    apply_multiplier, leray_entry, projected_tensor_divergence, to_physical, to_spectral, Grid, Multiplier,
    SpectralField,
};
use crate::trajectory::Trajectory;

/// Default switch point between the series and closed forms of `φ_1, φ_2`.
pub const DEFAULT_SERIES_THRESHOLD: f64 = 1e-3;

/// Product rule for `∫ e^{-λ(t-τ)} w(τ) dτ` with `w` piecewise linear in `τ`
/// and exact exponential moments.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureRule {
    pub series_threshold: f64,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self { series_threshold: DEFAULT_SERIES_THRESHOLD }
    }
}

impl QuadratureRule {
    pub fn new(series_threshold: f64) -> Result<Self> {
        if !(series_threshold > 0.0 && series_threshold < 1.0) {
            return Err(Error::arg(format!("series threshold must lie in (0, 1), got {series_threshold}")));
        }
        Ok(Self { series_threshold })
    }

    pub fn phi1(&self, z: f64) -> f64 {
        if z.abs() < self.series_threshold {
            phi_series(z, 1)
        } else {
            z.exp_m1() / z
        }
    }

    pub fn phi2(&self, z: f64) -> f64 {
        if z.abs() < self.series_threshold {
            phi_series(z, 2)
        } else {
            (z.exp_m1() - z) / (z * z)
        }
    }

    /// Weights `(a, b)` with `∫_0^h e^{-λ(h-σ)} w(σ) dσ = a w(0) + b w(h)`
    /// for linear `w`.
    pub fn panel_weights(&self, lambda: f64, h: f64) -> (f64, f64) {
        let z = -lambda * h;
        let p1 = self.phi1(z);
        let p2 = self.phi2(z);
        (h * (p1 - p2), h * p2)
    }
}

/// `φ_k(z) = Σ_{m≥0} z^m / (m+k)!`, summed until the terms stop mattering.
fn phi_series(z: f64, k: u32) -> f64 {
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    let mut term = 1.0 / fact;
    let mut sum = term;
    for m in 1..30 {
        term *= z / (m + k) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Graded grid `t_i = T (i/M)^γ`, `i = 0..=M`.
pub fn graded_times(t_final: f64, steps: usize, gamma: f64) -> Result<Vec<f64>> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::arg(format!("final time must be positive, got {t_final}")));
    }
    if steps == 0 {
        return Err(Error::arg("time grid needs at least one step"));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::arg(format!("grading exponent must be >= 1, got {gamma}")));
    }
    let mut times: Vec<f64> = (0..=steps).map(|i| t_final * (i as f64 / steps as f64).powf(gamma)).collect();
    times[steps] = t_final;
    Ok(times)
}

/// `e^{tΔ} u_0`.
pub fn heat_evolve(u0: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::arg(format!("heat time must be non-negative, got {t}")));
    }
    apply_multiplier(u0, &Multiplier::Heat(t))
}

/// Heat flow of `u_0` sampled on `times`.
pub fn heat_trajectory(u0: &SpectralField, times: &[f64]) -> Result<Trajectory> {
    let fields = times.par_iter().map(|&t| heat_evolve(u0, t)).collect::<Result<Vec<_>>>()?;
    Trajectory::new(times.to_vec(), fields)
}

/// `(u⊗v)_{ij} = u_i v_j`, stored at component `i·d + j`, computed
/// pseudo-spectrally with 2/3-rule truncation before and after the product.
pub fn nonlinear_tensor(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let g = *u.grid();
    let d = g.dim();
    if *v.grid() != g {
        return Err(Error::arg("tensor product of fields on different grids"));
    }
    if u.components() != d || v.components() != d {
        return Err(Error::arg("tensor product needs two velocity fields"));
    }
    let cutoff = g.dealias_cutoff();
    let physical = |f: &SpectralField| -> Result<Vec<f64>> {
        let mut f = f.clone();
        f.truncate_box(cutoff);
        to_physical(&f)
    };
    let (pu, pv) = rayon::join(|| physical(u), || physical(v));
    let (pu, pv) = (pu?, pv?);
    let m = g.modes();
    let mut samples = vec![0.0; d * d * m];
    for i in 0..d {
        for j in 0..d {
            let out = &mut samples[(i * d + j) * m..(i * d + j + 1) * m];
            let (ui, vj) = (&pu[i * m..(i + 1) * m], &pv[j * m..(j + 1) * m]);
            for ((o, a), b) in out.iter_mut().zip(ui).zip(vj) {
                *o = a * b;
            }
        }
    }
    let mut w = to_spectral(&g, d * d, &samples)?;
    w.truncate_box(cutoff);
    w.remove_mean();
    Ok(w)
}

/// `B(u,v)` on the common time grid of `u` and `v`, which must start at 0.
///
/// Uses `B(t_i) = e^{-λ h_i} B(t_{i-1}) + ∫_{t_{i-1}}^{t_i} e^{-λ(t_i-τ)} G(τ) dτ`
/// per mode, where `λ = |ξ|²` and `G = ℙ∇·(u⊗v)` is linear on each panel.
pub fn bilinear_b(u: &Trajectory, v: &Trajectory, rule: &QuadratureRule) -> Result<Trajectory> {
    if u.times() != v.times() {
        return Err(Error::arg("bilinear operator needs a shared time grid"));
    }
    if u.grid() != v.grid() {
        return Err(Error::arg("bilinear operator needs a shared spatial grid"));
    }
    if u.times()[0] != 0.0 {
        return Err(Error::arg("Duhamel time grid must start at t = 0"));
    }
    let g = *u.grid();
    let d = g.dim();
    let forcing = u
        .fields()
        .par_iter()
        .zip(v.fields())
        .map(|(a, b)| projected_tensor_divergence(&nonlinear_tensor(a, b)?))
        .collect::<Result<Vec<_>>>()?;

    let lambdas: Vec<f64> = (0..g.modes()).map(|f| g.xi_norm2(f)).collect();
    let times = u.times();
    let mut out = Vec::with_capacity(times.len());
    out.push(SpectralField::zeros(g, d));
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        let steps: Vec<(f64, f64, f64)> = lambdas
            .par_iter()
            .map(|&lam| {
                let (a, b) = rule.panel_weights(lam, h);
                ((-lam * h).exp(), a, b)
            })
            .collect();
        let mut next = SpectralField::zeros(g, d);
        for c in 0..d {
            let prev = out[i - 1].component(c);
            let g0 = forcing[i - 1].component(c);
            let g1 = forcing[i].component(c);
            next.component_mut(c).par_iter_mut().enumerate().for_each(|(flat, z)| {
                let (e, a, b) = steps[flat];
                *z = prev[flat] * e + g0[flat] * a + g1[flat] * b;
            });
        }
        out.push(next);
    }
    Trajectory::new(times.to_vec(), out)
}

/// `K̂_{l,k,j}(ξ) = (2π)^{-d/2} |ξ|^σ e^{-|ξ|²} (δ_{jk} - ξ_j ξ_k/|ξ|²)(iξ_l)`.
pub fn kernel_symbol(frac_s: f64, xi: &[f64], l: usize, k: usize, j: usize) -> Complex64 {
    let d = xi.len();
    let n2: f64 = xi.iter().map(|x| x * x).sum();
    if n2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let radial = (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0) * n2.powf(frac_s / 2.0) * (-n2).exp();
    Complex64::new(0.0, radial * leray_entry(xi, j, k) * xi[l])
}

/// Pointwise Frobenius norm of the kernel tensor over all `(l, k, j)`.
pub fn kernel_magnitude(frac_s: f64, xi: &[f64]) -> f64 {
    let d = xi.len();
    let mut sum = 0.0;
    for l in 0..d {
        for k in 0..d {
            for j in 0..d {
                sum += kernel_symbol(frac_s, xi, l, k, j).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// `h^{d/2} ‖K̂(√h ·)‖_{L^{r',1}}` evaluated on the frequency grid, the
/// discrete counterpart of `‖K(·/√h)‖_{𝓛^{r,1}}`.
pub fn kernel_fl_norm(frac_s: f64, r: f64, h: f64, grid: &Grid) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::arg(format!("kernel scale must be positive, got {h}")));
    }
    if !(frac_s >= 0.0) {
        return Err(Error::arg(format!("kernel regularity must be >= 0, got {frac_s}")));
    }
    let d = grid.dim();
    let sqrt_h = h.sqrt();
    let edge = sqrt_h * grid.dk() * (grid.n() / 2) as f64;
    if (-edge * edge).exp() > 1e-10 || sqrt_h * grid.dk() > 0.5 {
        log::warn!("kernel at scale h = {h} is not resolved on a {}-point grid", grid.n());
    }
    let mu = grid.cell_measure_xi();
    let atoms: Vec<Atom> = (1..grid.modes())
        .map(|flat| {
            let xi = grid.xi(flat);
            let scaled: Vec<f64> = xi[..d].iter().map(|x| x * sqrt_h).collect();
            Atom::new(kernel_magnitude(frac_s, &scaled), mu)
        })
        .collect();
    let profile = rearrange(&atoms)?;
    Ok(h.powf(d as f64 / 2.0) * lorentz_norm(&profile, conjugate(r), 1.0)?)
}
