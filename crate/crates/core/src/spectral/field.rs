use num_complex::Complex64;

use super::{fft, Grid};
use crate::error::{Error, Result};

/// Default relative tolerance for symmetry and projection checks.
pub const DEFAULT_TOL_EXACT: f64 = 1e-12;

/// Truncated Fourier coefficients of a scalar, vector or tensor field.
///
/// Coefficients are stored component-major; within a component the layout
/// follows [`Grid`]'s flat indexing. The forward transform carries `1/n^d`,
/// so a unit plane wave has coefficient 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, components: usize) -> Self {
        assert!(components >= 1, "a field has at least one component");
        Self { grid, components, coeffs: vec![Complex64::new(0.0, 0.0); components * grid.modes()] }
    }

    pub fn from_coeffs(grid: Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.modes() {
            return Err(Error::arg(format!(
                "expected {} coefficients for {} components, got {}",
                components * grid.modes(),
                components,
                coeffs.len()
            )));
        }
        Ok(Self { grid, components, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let m = self.grid.modes();
        &self.coeffs[c * m..(c + 1) * m]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let m = self.grid.modes();
        &mut self.coeffs[c * m..(c + 1) * m]
    }

    pub fn get(&self, c: usize, k: &[i64]) -> Complex64 {
        self.component(c)[self.grid.flat_index(k)]
    }

    pub fn set(&mut self, c: usize, k: &[i64], value: Complex64) {
        let flat = self.grid.flat_index(k);
        self.component_mut(c)[flat] = value;
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.grid.dim()
    }

    pub fn is_tensor(&self) -> bool {
        self.components == self.grid.dim() * self.grid.dim()
    }

    /// True when the zero mode of every component vanishes exactly.
    pub fn is_mean_zero(&self) -> bool {
        (0..self.components).all(|c| self.component(c)[0] == Complex64::new(0.0, 0.0))
    }

    pub fn remove_mean(&mut self) {
        for c in 0..self.components {
            self.component_mut(c)[0] = Complex64::new(0.0, 0.0);
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= factor);
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::arg("field grids or component counts differ"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { coeffs, ..*self })
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b * factor).collect();
        Ok(Self { coeffs, ..*self })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Coefficient inner product `Σ a conj(b)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    /// `sqrt(Σ |û|^2)` over all components, the root-mean-square of the
    /// physical field.
    pub fn l2_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermitian symmetry, `max |û(k) - conj û(-k)|`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for c in 0..self.components {
            let comp = self.component(c);
            for flat in 0..g.modes() {
                let neg = g.negated(flat);
                worst = worst.max((comp[flat] - comp[neg].conj()).norm());
            }
        }
        worst
    }

    /// Zero every mode with some `|k_i| > cutoff`.
    pub fn truncate_box(&mut self, cutoff: i64) {
        let g = self.grid;
        let keep: Vec<bool> = (0..g.modes()).map(|f| g.within_box(f, cutoff)).collect();
        for c in 0..self.components {
            for (z, &k) in self.component_mut(c).iter_mut().zip(&keep) {
                if !k {
                    *z = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Zero the Nyquist plane of every axis.
    pub fn strip_nyquist(&mut self) {
        self.truncate_box(self.grid.n() as i64 / 2 - 1);
    }
}

/// Forward transform of real samples laid out `components × n^d`.
pub fn to_spectral(grid: &Grid, components: usize, samples: &[f64]) -> Result<SpectralField> {
    let m = grid.modes();
    if components == 0 || samples.len() != components * m {
        return Err(Error::arg(format!(
            "sample array of length {} does not match {} components on a {}^{} grid",
            samples.len(),
            components,
            grid.n(),
            grid.dim()
        )));
    }
    let scale = 1.0 / m as f64;
    let mut coeffs: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    for chunk in coeffs.chunks_mut(m) {
        fft::transform(grid, chunk, false);
        chunk.iter_mut().for_each(|z| *z *= scale);
    }
    SpectralField::from_coeffs(*grid, components, coeffs)
}

/// Inverse transform to real samples, rejecting fields that are not
/// Hermitian to within [`DEFAULT_TOL_EXACT`] relative to their largest
/// coefficient.
pub fn to_physical(field: &SpectralField) -> Result<Vec<f64>> {
    to_physical_with_tol(field, DEFAULT_TOL_EXACT)
}

pub fn to_physical_with_tol(field: &SpectralField, tol: f64) -> Result<Vec<f64>> {
    let asym = field.hermitian_asymmetry();
    let scale = field.max_abs();
    if asym > tol * scale {
        return Err(Error::numeric(format!(
            "field is not Hermitian: max asymmetry {asym:e} exceeds {:e}",
            tol * scale
        )));
    }
    Ok(inverse_complex(field).into_iter().map(|z| z.re).collect())
}

/// Inverse transform without symmetry checks; complex output.
pub fn inverse_complex(field: &SpectralField) -> Vec<Complex64> {
    let m = field.grid().modes();
    let mut data = field.coeffs().to_vec();
    for chunk in data.chunks_mut(m) {
        fft::transform(field.grid(), chunk, true);
    }
    data
}
