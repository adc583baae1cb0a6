//! The quadratic fixed-point engine on the scalar model x = y - η x².

use fl_nse::picard::{estimate_bilinear_bound, solve_quadratic_fixed_point, PicardOptions};
use rand::Rng;

fn main() -> fl_nse::Result<()> {
    let eta = 1.0;
    let opts = PicardOptions { eta: Some(eta), tol: 1e-15, max_iter: 10_000, ..Default::default() };
    let b = |x: &f64, z: &f64| Ok(eta * x * z);
    let norm = |x: &f64| Ok(x.abs());

    println!("{:>8} {:>22} {:>22} {:>6} {:>10} {:>6}", "y", "picard", "root", "iters", "verdict", "ηy<=¼");
    for y in [-0.24, -0.1, 0.0, 0.125, 0.25, 0.4, 3.0] {
        let (x, rep) = solve_quadratic_fixed_point(&y, b, norm, &opts)?;
        let disc = 1.0 + 4.0 * eta * y;
        let root = if disc >= 0.0 { 2.0 * y / (1.0 + disc.sqrt()) } else { f64::NAN };
        let small = rep.threshold_check.unwrap_or(false);
        println!("{y:>8} {x:>22.16} {root:>22.16} {:>6} {:>10} {small:>6}", rep.iterations, rep.verdict);
        if let Some(i) = rep.blowup_index {
            println!(
                "         blow-up flagged at iterate {i}, last ratios {:?}",
                &rep.ratios[rep.ratios.len().saturating_sub(3)..]
            );
        }
    }

    // recover η from random unit pairs
    let est = estimate_bilinear_bound(
        |x: &f64, z: &f64| Ok(3.0 * x * z),
        |x: &f64| Ok(x.abs()),
        |rng| Ok(rng.random_range(-1.0..1.0)),
        32,
        5,
    )?;
    println!("estimated η for B(x, z) = 3xz: {} from {} pairs", est.eta, est.trials);
    Ok(())
}
