//! Pseudo-spectral laboratory for mild solutions of the incompressible
//! Navier-Stokes equations in Sobolev-Fourier-Lorentz spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: periodic grids, spectral fields, the discrete Fourier
//!   transform and every Fourier multiplier (Λ^s, heat, Riesz, Leray, ...).
//! - [`lorentz`]: decreasing rearrangements and the Lorentz,
//!   Fourier-Lorentz and Sobolev-Fourier-Lorentz norms, plus the
//!   time-weighted sup norms used as the fixed-point arena.
//! - [`duhamel`]: heat evolution, the dealiased tensor product and the
//!   bilinear Duhamel operator on graded time grids.
//! - [`picard`]: a generic quadratic fixed-point engine with contraction
//!   monitoring.
//! - [`solver`]: the mild-solution driver with smallness diagnostics.
//! - [`verify`]: randomized ratio, identity, exponent and tail suites.
//! - [`io`]: configuration files, binary field files, initial data,
//!   reports and the command-line front end.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod duhamel;
pub mod error;
pub mod io;
pub mod lorentz;
pub mod picard;
pub mod sampler;
pub mod solver;
pub mod spectral;
pub mod trajectory;
pub mod verify;

mod summation;

pub use error::{Error, Result};
pub use lorentz::{NormSpec, RearrangementProfile};
pub use spectral::{Grid, Multiplier, SpectralField};
pub use trajectory::Trajectory;

pub use num_complex::Complex64;
