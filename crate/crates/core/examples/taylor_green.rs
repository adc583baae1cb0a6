//! End-to-end mild solution from Taylor-Green data, which the nonlinearity
//! leaves untouched: u(t) = e^{-2t} u₀.

use fl_nse::io::report::trajectory_csv;
use fl_nse::solver::{run_mild_solution, RunConfig};

fn main() -> fl_nse::Result<()> {
    let cfg = RunConfig::default();
    let (u, report) = run_mild_solution(&cfg)?;
    println!(
        "regime {} (α = {}), verdict {} after {} iterations",
        report.regime.name, report.regime.alpha, report.verdict, report.picard.iterations
    );
    println!("max relative deviation from heat flow: {:.3e}", report.heat_deviation);
    println!("max divergence residual: {:.3e}", report.max_div_residual);
    println!(
        "caloric smallness {:.6}, η̂ = {:?}, below 1/(4η̂): {:?}",
        report.caloric_smallness, report.eta_hat, report.below_threshold
    );
    println!("{} samples, t_M = {}", u.len(), u.times()[u.len() - 1]);

    let csv = trajectory_csv(&report.table);
    for line in csv.lines().take(4) {
        println!("{line}");
    }
    println!("...");
    Ok(())
}
