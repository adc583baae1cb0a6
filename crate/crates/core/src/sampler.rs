//! Random band-limited fields with power-law spectral envelopes.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::spectral::{leray_project, Grid, SpectralField};

/// How the modulus of each retained coefficient is drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AmplitudeLaw {
    /// Independent standard complex Gaussian times the envelope.
    Gaussian,
    /// Unit modulus with a uniform random phase, so `|û| = |ξ|^{-a}` exactly.
    RandomPhase,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumShape {
    /// Envelope exponent `a` in `|û(ξ)| ~ |ξ|^{-a}`.
    pub slope: f64,
    /// Keep modes with every `|k_i| <= band`; `None` keeps everything
    /// below the Nyquist plane.
    pub band: Option<i64>,
    pub amplitude: AmplitudeLaw,
    pub divergence_free: bool,
}

impl Default for SpectrumShape {
    fn default() -> Self {
        Self { slope: 1.0, band: None, amplitude: AmplitudeLaw::Gaussian, divergence_free: false }
    }
}

/// Draws Hermitian, mean-zero fields without Nyquist content.
#[derive(Clone, Debug)]
pub struct FieldSampler {
    grid: Grid,
    components: usize,
    shape: SpectrumShape,
}

impl FieldSampler {
    pub fn new(grid: Grid, components: usize, shape: SpectrumShape) -> Self {
        Self { grid, components, shape }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpectralField {
        let g = self.grid;
        let band = self.shape.band.unwrap_or(g.n() as i64 / 2 - 1).min(g.n() as i64 / 2 - 1);
        let mut field = SpectralField::zeros(g, self.components);
        for flat in 1..g.modes() {
            let neg = g.negated(flat);
            if neg < flat || !g.within_box(flat, band) {
                continue;
            }
            let envelope = g.xi_norm2(flat).powf(-self.shape.slope / 2.0);
            for c in 0..self.components {
                let z = match self.shape.amplitude {
                    AmplitudeLaw::Gaussian => {
                        let re: f64 = StandardNormal.sample(rng);
                        let im: f64 = StandardNormal.sample(rng);
                        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                    }
                    AmplitudeLaw::RandomPhase => {
                        let theta = rng.random_range(0.0..std::f64::consts::TAU);
                        Complex64::from_polar(1.0, theta)
                    }
                } * envelope;
                let comp = field.component_mut(c);
                comp[flat] = z;
                comp[neg] = z.conj();
            }
        }
        if self.shape.divergence_free && self.components == g.dim() {
            field = leray_project(&field).expect("vector field");
        }
        field
    }
}
