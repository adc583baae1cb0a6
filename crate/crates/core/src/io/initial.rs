//! Initial data generators.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampler::{AmplitudeLaw, FieldSampler, SpectrumShape};
use crate::spectral::{Grid, SpectralField};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    /// `amp · (sin x₁ cos x₂, -cos x₁ sin x₂, 0)` in box-scaled coordinates.
    TaylorGreen {
        amp: f64,
    },
    /// Leray-projected random field with `|û| ~ |ξ|^{-slope}`, rescaled so
    /// that `sqrt(Σ |û|²) = amp`.
    RandomDivfree {
        slope: f64,
        amp: f64,
        seed: u64,
        band: Option<i64>,
    },
    Zero,
}

impl InitialData {
    pub fn from_kind(kind: &str, slope: f64, amp: f64, seed: u64) -> Result<Self> {
        match kind {
            "taylor-green" => Ok(InitialData::TaylorGreen { amp }),
            "random-divfree" => Ok(InitialData::RandomDivfree { slope, amp, seed, band: None }),
            "zero" => Ok(InitialData::Zero),
            other => Err(Error::arg(format!(
                "unknown initial data kind '{other}' (expected taylor-green, random-divfree or zero)"
            ))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InitialData::TaylorGreen { .. } => "taylor-green",
            InitialData::RandomDivfree { .. } => "random-divfree",
            InitialData::Zero => "zero",
        }
    }

    pub fn with_amp(&self, new_amp: f64) -> Self {
        match self.clone() {
            InitialData::TaylorGreen { .. } => InitialData::TaylorGreen { amp: new_amp },
            InitialData::RandomDivfree { slope, seed, band, .. } => {
                InitialData::RandomDivfree { slope, amp: new_amp, seed, band }
            }
            InitialData::Zero => InitialData::Zero,
        }
    }
}

/// Divergence-free, mean-zero, Hermitian velocity field on `grid`.
pub fn generate_initial_data(grid: &Grid, data: &InitialData) -> Result<SpectralField> {
    let d = grid.dim();
    let mut u = SpectralField::zeros(*grid, d);
    match *data {
        InitialData::Zero => {}
        InitialData::TaylorGreen { amp } => {
            check_amp(amp)?;
            for s1 in [-1i64, 1] {
                for s2 in [-1i64, 1] {
                    let mut k = [0i64; 3];
                    k[0] = s1;
                    k[1] = s2;
                    u.set(0, &k[..d], Complex64::new(0.0, -0.25 * s1 as f64 * amp));
                    u.set(1, &k[..d], Complex64::new(0.0, 0.25 * s2 as f64 * amp));
                }
            }
        }
        InitialData::RandomDivfree { slope, amp, seed, band } => {
            check_amp(amp)?;
            if !slope.is_finite() {
                return Err(Error::arg(format!("spectral slope must be finite, got {slope}")));
            }
            if amp == 0.0 {
                return Ok(u);
            }
            let shape = SpectrumShape {
                slope,
                band: Some(band.unwrap_or(grid.dealias_cutoff())),
                amplitude: AmplitudeLaw::Gaussian,
                divergence_free: true,
            };
            let raw = FieldSampler::new(*grid, d, shape).sample(&mut ChaCha8Rng::seed_from_u64(seed));
            let norm = raw.l2_coeff_norm();
            if norm == 0.0 {
                return Err(Error::arg("random band is empty on this grid"));
            }
            u = raw.scaled(amp / norm);
        }
    }
    Ok(u)
}

fn check_amp(amp: f64) -> Result<()> {
    if !amp.is_finite() {
        return Err(Error::arg(format!("amplitude must be finite, got {amp}")));
    }
    Ok(())
}
