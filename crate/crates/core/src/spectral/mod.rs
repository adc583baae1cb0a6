//! Periodic grids, spectral fields, the discrete transform contract and the
//! Fourier multiplier operators.

mod fft;
mod field;
mod grid;
mod multiplier;

pub use field::{inverse_complex, to_physical, to_physical_with_tol, to_spectral, SpectralField, DEFAULT_TOL_EXACT};
pub use grid::{Grid, Wavevector};
pub(crate) use multiplier::leray_entry;
pub use multiplier::{
    apply_multiplier, derivative, divergence, divergence_residual, leray_project, projected_tensor_divergence,
    tensor_divergence, Multiplier,
};
