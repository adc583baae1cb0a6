//! Small data converge, large data do not: a sweep over the amplitude of a
//! random divergence-free initial field.

use fl_nse::io::initial::InitialData;
use fl_nse::solver::{amplitude_sweep, RunConfig};

fn main() -> fl_nse::Result<()> {
    let cfg = RunConfig {
        initial: InitialData::RandomDivfree { slope: 1.0, amp: 1.0, seed: 3, band: None },
        ..Default::default()
    };
    let sweep = amplitude_sweep(&cfg, &[0.1, 0.3, 1.0, 3.0, 10.0, 30.0])?;
    if let Some(eta) = sweep.eta_hat {
        println!("η̂ = {eta:.5}, smallness threshold 1/(4η̂) = {:.3}", 0.25 / eta);
    }
    println!("{:>6} {:>10} {:>6} {:>12} {:>12}", "amp", "verdict", "iters", "ratio", "caloric");
    for p in &sweep.points {
        println!(
            "{:>6} {:>10} {:>6} {:>12.4e} {:>12.4e}",
            p.amplitude, p.verdict, p.iterations, p.contraction_ratio, p.caloric_smallness
        );
    }
    println!("monotone contraction ratio: {}", sweep.monotone);
    Ok(())
}
