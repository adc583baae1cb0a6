//! The bilinear Duhamel operator B(u, v) on a graded time grid and the
//! exponential product quadrature behind it.

use fl_nse::duhamel::{bilinear_b, graded_times, heat_trajectory, kernel_fl_norm, QuadratureRule};
use fl_nse::io::initial::{generate_initial_data, InitialData};
use fl_nse::lorentz::{weighted_sup_norm, NormSpec};
use fl_nse::Grid;

fn main() -> fl_nse::Result<()> {
    let rule = QuadratureRule::default();
    for z in [-1e-6, -1e-3, -0.5, -20.0] {
        println!("φ1({z}) = {:.15}, φ2({z}) = {:.15}", rule.phi1(z), rule.phi2(z));
    }
    let (a, b) = rule.panel_weights(4.0, 0.1);
    println!("panel weights λ = 4, h = 0.1: a = {a:.15}, b = {b:.15}");

    let times = graded_times(0.5, 16, 2.0)?;
    println!("graded grid: first steps {:.5} {:.5} {:.5}, last {:.5}", times[1], times[2], times[3], times[16]);

    let grid = Grid::periodic(2, 32)?;
    let aux = NormSpec::new(0.0, 3.0, f64::INFINITY)?;
    let weight = 0.5 * (1.0 - 2.0 / 3.0);

    // Taylor-Green: u·∇u is a gradient, so B(y, y) vanishes
    let tg = generate_initial_data(&grid, &InitialData::TaylorGreen { amp: 1.0 })?;
    let y = heat_trajectory(&tg, &times)?;
    let b = bilinear_b(&y, &y, &rule)?;
    println!("Taylor-Green ‖B(y, y)‖_K = {:.3e}", weighted_sup_norm(&b, &aux, weight)?.value);

    // random data: B is bilinear, B(2y, y) = 2 B(y, y)
    let u0 = generate_initial_data(&grid, &InitialData::RandomDivfree { slope: 1.0, amp: 2.0, seed: 1, band: None })?;
    let y = heat_trajectory(&u0, &times)?;
    let byy = bilinear_b(&y, &y, &rule)?;
    let b2 = bilinear_b(&y.scaled(2.0), &y, &rule)?;
    let k = |t: &fl_nse::Trajectory| weighted_sup_norm(t, &aux, weight).map(|w| w.value);
    println!("‖B(y,y)‖_K = {:.6e}, ‖B(2y,y) - 2B(y,y)‖_K = {:.3e}", k(&byy)?, k(&b2.sub(&byy.scaled(2.0))?)?);
    println!("‖y‖_K = {:.6e}", k(&y)?);

    // kernel norms scale like h^{d/(2r)}
    let fine = Grid::periodic(2, 256)?;
    let (k1, k2) = (kernel_fl_norm(0.0, 2.0, 0.01, &fine)?, kernel_fl_norm(0.0, 2.0, 0.04, &fine)?);
    println!("kernel norm ratio over h x4: {:.6} (expected 4^(1/2) = 2)", k2 / k1);
    Ok(())
}
