//! Every verification suite at modest sizes, with its one-line verdict.
//!
//! Pass a suite name to run just that one.

use fl_nse::verify::{run_suite, suite_names, SuiteConfig};

fn main() -> fl_nse::Result<()> {
    let only = std::env::args().nth(1);
    for name in suite_names() {
        if only.as_deref().is_some_and(|o| o != name) {
            continue;
        }
        let n = match name {
            "kernel_scaling" => 256,
            "heat_decay" | "heat_decay_p_ge_d" | "caloric_1" => 128,
            "tail" => 64,
            _ => 32,
        };
        let result = run_suite(&SuiteConfig::new(name, 2, n, 50, 1))?;
        println!("{}", result.summary());
        for note in &result.notes {
            println!("    {note}");
        }
    }

    // hypotheses are checked before anything runs
    let bad = SuiteConfig::new("product", 2, 32, 10, 0).with("k", 0.0).with("p", 1.5);
    if let Err(e) = run_suite(&bad) {
        println!("rejected: {e}");
    }
    Ok(())
}
