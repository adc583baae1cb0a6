//! Fourier multipliers on a periodic grid: derivatives, Riesz transforms,
//! the Leray projection and the heat semigroup.

use fl_nse::sampler::{FieldSampler, SpectrumShape};
use fl_nse::spectral::{apply_multiplier, derivative, divergence_residual, leray_project, to_physical, to_spectral};
use fl_nse::{Grid, Multiplier};
use rand::SeedableRng;

fn main() -> fl_nse::Result<()> {
    let grid = Grid::periodic(2, 32)?;

    // f = sin(3x) cos(y); ∂x f = 3 cos(3x) cos(y)
    let samples: Vec<f64> = (0..grid.modes())
        .map(|i| {
            let x = grid.point(i);
            (3.0 * x[0]).sin() * x[1].cos()
        })
        .collect();
    let mut f = to_spectral(&grid, 1, &samples)?;
    f.remove_mean();
    let dx = to_physical(&derivative(&f, &[1, 0])?)?;
    let err = (0..grid.modes())
        .map(|i| {
            let x = grid.point(i);
            (dx[i] - 3.0 * (3.0 * x[0]).cos() * x[1].cos()).abs()
        })
        .fold(0.0, f64::max);
    println!("spectral derivative error: {err:.2e}");

    // Λ^s then Λ^{-s} is the identity on mean-zero fields
    let lifted = apply_multiplier(&f, &Multiplier::LambdaPower(1.5))?;
    let back = apply_multiplier(&lifted, &Multiplier::LambdaPower(-1.5))?;
    println!("Λ^-s Λ^s round trip error: {:.2e}", back.sub(&f)?.max_abs());

    // Σ R_j² = -1 on mean-zero scalars
    let r1 = apply_multiplier(&apply_multiplier(&f, &Multiplier::Riesz(0))?, &Multiplier::Riesz(0))?;
    let r2 = apply_multiplier(&apply_multiplier(&f, &Multiplier::Riesz(1))?, &Multiplier::Riesz(1))?;
    println!("R1² + R2² + 1 error: {:.2e}", r1.add(&r2)?.add(&f)?.max_abs());

    // Leray projection of a random vector field
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let u = FieldSampler::new(grid, 2, SpectrumShape::default()).sample(&mut rng);
    let pu = leray_project(&u)?;
    println!(
        "divergence before/after projection: {:.2e} / {:.2e}",
        divergence_residual(&u)?,
        divergence_residual(&pu)?
    );
    let idem = leray_project(&pu)?.sub(&pu)?.max_abs();
    println!("projection idempotence error: {idem:.2e}");

    // heat flow damps mode k by e^{-t|k|²}
    let heated = apply_multiplier(&f, &Multiplier::Heat(0.1))?;
    let ratio = heated.get(0, &[3, 1]).norm() / f.get(0, &[3, 1]).norm();
    println!("heat damping of mode (3, 1): {ratio:.12} vs e^(-1) = {:.12}", (-1.0f64).exp());
    Ok(())
}
