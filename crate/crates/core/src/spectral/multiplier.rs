use num_complex::Complex64;

use super::{Grid, SpectralField};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fourier multiplier symbols.
///
/// Homogeneous symbols vanish at `ξ = 0`. Odd symbols use
/// [`Grid::xi_odd`], which drops the Nyquist component.
#[derive(Clone, Debug, PartialEq)]
pub enum Multiplier {
    /// `Λ^s`: `û ↦ |ξ|^s û`.
    LambdaPower(f64),
    /// `e^{tΔ}`: `û ↦ e^{-t|ξ|²} û`.
    Heat(f64),
    /// `R_j`: `û ↦ (i ξ_j / |ξ|) û`.
    Riesz(usize),
    /// Leray projection `δ_{jk} - ξ_j ξ_k / |ξ|²` (vector fields).
    Leray,
    /// `∂^α`: `û ↦ (iξ)^α û`.
    Derivative(Vec<u32>),
    /// Component `j` of `ℙ∇·F` for a tensor field `F`.
    ProjectedDivergence(usize),
}

impl Multiplier {
    /// Value of a scalar symbol at one mode. `None` for the matrix-valued
    /// Leray and projected-divergence symbols.
    pub fn scalar_symbol(&self, grid: &Grid, flat: usize) -> Option<Complex64> {
        let d = grid.dim();
        Some(match self {
            Multiplier::LambdaPower(s) => {
                if *s == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else if flat == 0 {
                    ZERO
                } else {
                    Complex64::new(grid.xi_norm2(flat).powf(s / 2.0), 0.0)
                }
            }
            Multiplier::Heat(t) => Complex64::new((-t * grid.xi_norm2(flat)).exp(), 0.0),
            Multiplier::Riesz(j) => {
                let xi = grid.xi_odd(flat);
                let norm = xi[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    ZERO
                } else {
                    I * (xi[*j] / norm)
                }
            }
            Multiplier::Derivative(alpha) => derivative_symbol(grid, flat, alpha),
            Multiplier::Leray | Multiplier::ProjectedDivergence(_) => return None,
        })
    }
}

fn derivative_symbol(grid: &Grid, flat: usize, alpha: &[u32]) -> Complex64 {
    let xi = grid.xi(flat);
    let xi_odd = grid.xi_odd(flat);
    let mut value = Complex64::new(1.0, 0.0);
    for (a, &order) in alpha.iter().enumerate() {
        if order == 0 {
            continue;
        }
        let x = if order % 2 == 1 { xi_odd[a] } else { xi[a] };
        value *= (I * x).powu(order);
    }
    value
}

/// Leray projector entry `δ_{jk} - ξ_j ξ_k / |ξ|²` on the odd wavevector.
/// At `ξ = 0` the off-diagonal entries vanish and the diagonal is 1.
pub(crate) fn leray_entry(xi: &[f64], j: usize, k: usize) -> f64 {
    let n2: f64 = xi.iter().map(|x| x * x).sum();
    let delta = if j == k { 1.0 } else { 0.0 };
    if n2 == 0.0 {
        delta
    } else {
        delta - xi[j] * xi[k] / n2
    }
}

fn apply_scalar(f: &SpectralField, symbol: impl Fn(usize) -> Complex64) -> SpectralField {
    let g = *f.grid();
    let table: Vec<Complex64> = (0..g.modes()).map(symbol).collect();
    let mut out = f.clone();
    for c in 0..f.components() {
        for (z, m) in out.component_mut(c).iter_mut().zip(&table) {
            *z *= m;
        }
    }
    out
}

/// Coefficientwise application of a multiplier symbol.
pub fn apply_multiplier(f: &SpectralField, m: &Multiplier) -> Result<SpectralField> {
    match m {
        Multiplier::LambdaPower(s) if *s < 0.0 && !f.is_mean_zero() => {
            return Err(Error::domain("Λ^s with s < 0 requires a mean-zero field"))
        }
        Multiplier::Riesz(_) if !f.is_mean_zero() => {
            return Err(Error::domain("Riesz transforms require a mean-zero field"))
        }
        Multiplier::Riesz(j) if *j >= f.grid().dim() => {
            return Err(Error::arg(format!("Riesz index {j} out of range")))
        }
        Multiplier::Heat(t) if !(*t >= 0.0) => {
            return Err(Error::arg(format!("heat time must be non-negative, got {t}")))
        }
        Multiplier::Derivative(alpha) if alpha.len() != f.grid().dim() => {
            return Err(Error::arg("multi-index length must equal the dimension"))
        }
        Multiplier::Leray => return leray_project(f),
        Multiplier::ProjectedDivergence(j) => {
            let full = projected_tensor_divergence(f)?;
            let d = f.grid().dim();
            if *j >= d {
                return Err(Error::arg(format!("component {j} out of range")));
            }
            return SpectralField::from_coeffs(*f.grid(), 1, full.component(*j).to_vec());
        }
        _ => {}
    }
    let g = *f.grid();
    Ok(apply_scalar(f, |flat| m.scalar_symbol(&g, flat).expect("scalar symbol")))
}

/// `∂^α f`.
pub fn derivative(f: &SpectralField, alpha: &[u32]) -> Result<SpectralField> {
    apply_multiplier(f, &Multiplier::Derivative(alpha.to_vec()))
}

/// Projection onto divergence-free vector fields.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    let g = *u.grid();
    let d = g.dim();
    if u.components() != d {
        return Err(Error::arg(format!("Leray projection needs a {d}-component field, got {}", u.components())));
    }
    let mut out = SpectralField::zeros(g, d);
    let mut v = [ZERO; 3];
    for flat in 0..g.modes() {
        let xi = g.xi_odd(flat);
        for (k, vk) in v.iter_mut().enumerate().take(d) {
            *vk = u.component(k)[flat];
        }
        for j in 0..d {
            let mut acc = ZERO;
            for (k, vk) in v.iter().enumerate().take(d) {
                acc += *vk * leray_entry(&xi[..d], j, k);
            }
            out.component_mut(j)[flat] = acc;
        }
    }
    Ok(out)
}

/// Row divergence of a tensor field, `(∇·F)_j = Σ_l ∂_l F_{lj}`.
pub fn tensor_divergence(w: &SpectralField) -> Result<SpectralField> {
    let g = *w.grid();
    let d = g.dim();
    if w.components() != d * d {
        return Err(Error::arg(format!("tensor divergence needs {} components, got {}", d * d, w.components())));
    }
    let mut out = SpectralField::zeros(g, d);
    for flat in 0..g.modes() {
        let xi = g.xi_odd(flat);
        for j in 0..d {
            let mut acc = ZERO;
            for (l, &xl) in xi.iter().enumerate().take(d) {
                acc += I * xl * w.component(l * d + j)[flat];
            }
            out.component_mut(j)[flat] = acc;
        }
    }
    Ok(out)
}

/// `ℙ∇·F` in a single pass with the symbol
/// `Σ_{l,k} (δ_{jk} - ξ_j ξ_k/|ξ|²)(iξ_l) F̂_{lk}`.
pub fn projected_tensor_divergence(w: &SpectralField) -> Result<SpectralField> {
    let g = *w.grid();
    let d = g.dim();
    if w.components() != d * d {
        return Err(Error::arg(format!(
            "projected divergence needs a {}-component tensor, got {}",
            d * d,
            w.components()
        )));
    }
    let mut out = SpectralField::zeros(g, d);
    let mut div = [ZERO; 3];
    for flat in 0..g.modes() {
        let xi = g.xi_odd(flat);
        for (k, dk) in div.iter_mut().enumerate().take(d) {
            let mut acc = ZERO;
            for (l, &xl) in xi.iter().enumerate().take(d) {
                acc += xl * w.component(l * d + k)[flat];
            }
            *dk = I * acc;
        }
        for j in 0..d {
            let mut acc = ZERO;
            for (k, dk) in div.iter().enumerate().take(d) {
                acc += *dk * leray_entry(&xi[..d], j, k);
            }
            out.component_mut(j)[flat] = acc;
        }
    }
    Ok(out)
}

/// Divergence of a vector field as a scalar field.
pub fn divergence(u: &SpectralField) -> Result<SpectralField> {
    let g = *u.grid();
    let d = g.dim();
    if u.components() != d {
        return Err(Error::arg("divergence needs a vector field"));
    }
    let mut out = SpectralField::zeros(g, 1);
    for flat in 0..g.modes() {
        let xi = g.xi_odd(flat);
        let acc: Complex64 = (0..d).map(|k| I * xi[k] * u.component(k)[flat]).sum();
        out.component_mut(0)[flat] = acc;
    }
    Ok(out)
}

/// Dimensionless divergence residual `max |ξ·û| / max |ξ||û|`
/// (zero for the zero field).
pub fn divergence_residual(u: &SpectralField) -> Result<f64> {
    let g = *u.grid();
    let d = g.dim();
    if u.components() != d {
        return Err(Error::arg("divergence residual needs a vector field"));
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for flat in 0..g.modes() {
        let xi = g.xi_odd(flat);
        let xn = xi[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut dot = ZERO;
        for k in 0..d {
            let z = u.component(k)[flat];
            dot += z * xi[k];
            den = den.max(xn * z.norm());
        }
        num = num.max(dot.norm());
    }
    Ok(if den == 0.0 { 0.0 } else { num / den })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{FieldSampler, SpectrumShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::periodic(2, 16).unwrap()
    }

    fn random_field(components: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FieldSampler::new(grid(), components, SpectrumShape::default()).sample(&mut rng)
    }

    fn assert_close(a: &SpectralField, b: &SpectralField, tol: f64) {
        let scale = a.max_abs().max(b.max_abs()).max(1e-300);
        let diff = a.sub(b).unwrap().max_abs();
        assert!(diff <= tol * scale, "diff {diff:e} scale {scale:e}");
    }

    #[test]
    fn heat_zero_is_identity() {
        let f = random_field(2, 1);
        assert_eq!(apply_multiplier(&f, &Multiplier::Heat(0.0)).unwrap(), f);
    }

    #[test]
    fn lambda_inverse_pair() {
        let f = random_field(1, 2);
        let up = apply_multiplier(&f, &Multiplier::LambdaPower(2.0)).unwrap();
        let back = apply_multiplier(&up, &Multiplier::LambdaPower(-2.0)).unwrap();
        assert_close(&back, &f, 1e-12);
    }

    #[test]
    fn negative_power_needs_mean_zero() {
        let mut f = random_field(1, 3);
        f.component_mut(0)[0] = Complex64::new(1.0, 0.0);
        assert!(matches!(apply_multiplier(&f, &Multiplier::LambdaPower(-1.0)), Err(Error::Domain(_))));
        assert!(matches!(apply_multiplier(&f, &Multiplier::Riesz(0)), Err(Error::Domain(_))));
        assert!(apply_multiplier(&f, &Multiplier::Heat(-1.0)).is_err());
    }

    #[test]
    fn riesz_squares_sum_to_minus_identity() {
        let f = random_field(1, 4);
        let mut acc = SpectralField::zeros(grid(), 1);
        for j in 0..2 {
            let once = apply_multiplier(&f, &Multiplier::Riesz(j)).unwrap();
            let twice = apply_multiplier(&once, &Multiplier::Riesz(j)).unwrap();
            acc = acc.add(&twice).unwrap();
        }
        assert_close(&acc, &f.scaled(-1.0), 1e-12);
    }

    #[test]
    fn leray_kills_gradients() {
        let phi = random_field(1, 5);
        let g = grid();
        let mut grad = SpectralField::zeros(g, 2);
        for a in 0..2 {
            let mut alpha = vec![0; 2];
            alpha[a] = 1;
            let da = derivative(&phi, &alpha).unwrap();
            grad.component_mut(a).copy_from_slice(da.component(0));
        }
        let p = leray_project(&grad).unwrap();
        assert!(p.max_abs() <= 1e-12 * grad.max_abs());
    }

    #[test]
    fn leray_projects_and_is_idempotent() {
        let u = random_field(2, 6);
        let p = leray_project(&u).unwrap();
        assert!(divergence_residual(&p).unwrap() <= 1e-12);
        let pp = leray_project(&p).unwrap();
        assert_close(&pp, &p, 1e-12);
        // divergence-free input is a fixed point
        assert_close(&leray_project(&pp).unwrap(), &pp, 1e-12);
    }

    #[test]
    fn leray_is_self_adjoint() {
        let u = random_field(2, 7);
        let v = random_field(2, 8);
        let lhs = leray_project(&u).unwrap().inner(&v).unwrap();
        let rhs = u.inner(&leray_project(&v).unwrap()).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn leray_rejects_wrong_components() {
        assert!(matches!(leray_project(&random_field(1, 9)), Err(Error::Argument(_))));
        assert!(matches!(projected_tensor_divergence(&random_field(2, 9)), Err(Error::Argument(_))));
    }

    #[test]
    fn projected_divergence_matches_composed_path() {
        let w = random_field(4, 10);
        let one_pass = projected_tensor_divergence(&w).unwrap();
        let composed = leray_project(&tensor_divergence(&w).unwrap()).unwrap();
        assert_close(&one_pass, &composed, 1e-12);
        assert!(divergence_residual(&one_pass).unwrap() <= 1e-12);
        assert_eq!(projected_tensor_divergence(&SpectralField::zeros(grid(), 4)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn hessian_tensor_has_no_projected_divergence() {
        let phi = random_field(1, 11);
        let g = grid();
        let mut w = SpectralField::zeros(g, 4);
        for l in 0..2 {
            for j in 0..2 {
                let mut alpha = vec![0u32; 2];
                alpha[l] += 1;
                alpha[j] += 1;
                let h = derivative(&phi, &alpha).unwrap();
                w.component_mut(l * 2 + j).copy_from_slice(h.component(0));
            }
        }
        let out = projected_tensor_divergence(&w).unwrap();
        assert!(out.max_abs() <= 1e-12 * w.max_abs());
    }

    #[test]
    fn derivative_single_mode_and_commutation() {
        let g = grid();
        let mut f = SpectralField::zeros(g, 1);
        f.set(0, &[1, 0], Complex64::new(1.0, 0.0));
        let d1 = derivative(&f, &[1, 0]).unwrap();
        assert_eq!(d1.get(0, &[1, 0]), Complex64::new(0.0, 1.0));
        assert_eq!(derivative(&f, &[0, 0]).unwrap(), f);

        let r = random_field(1, 12);
        let a = derivative(&derivative(&r, &[1, 0]).unwrap(), &[0, 1]).unwrap();
        let b = derivative(&derivative(&r, &[0, 1]).unwrap(), &[1, 0]).unwrap();
        // same factors, different rounding order
        assert!(a.sub(&b).unwrap().max_abs() <= 4.0 * f64::EPSILON * a.max_abs());
    }

    #[test]
    fn multipliers_commute() {
        let f = random_field(1, 13);
        let ms = [
            Multiplier::LambdaPower(0.7),
            Multiplier::Heat(0.1),
            Multiplier::Riesz(1),
            Multiplier::Derivative(vec![1, 2]),
        ];
        for a in &ms {
            for b in &ms {
                let ab = apply_multiplier(&apply_multiplier(&f, a).unwrap(), b).unwrap();
                let ba = apply_multiplier(&apply_multiplier(&f, b).unwrap(), a).unwrap();
                assert_close(&ab, &ba, 1e-15);
            }
        }
    }
}
