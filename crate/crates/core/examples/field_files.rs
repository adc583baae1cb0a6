//! Binary field files, config files and reports on disk.

use fl_nse::io::config::ConfigFile;
use fl_nse::io::field_file::{encoded_len, read_field, write_field};
use fl_nse::io::initial::{generate_initial_data, InitialData};
use fl_nse::io::report::emit_solve_report;
use fl_nse::lorentz::sfl_norm;
use fl_nse::solver::run_mild_solution;
use fl_nse::{Grid, NormSpec};

const CONFIG: &str = "
[grid]
d = 2
n = 16
[time]
T = 0.25
M = 32
[initial]
kind = random-divfree
amp = 0.5
seed = 11
";

fn main() -> fl_nse::Result<()> {
    let dir = std::env::temp_dir().join("fl-nse-field-files");
    std::fs::create_dir_all(&dir)?;

    let grid = Grid::periodic(2, 16)?;
    let u = generate_initial_data(&grid, &InitialData::TaylorGreen { amp: 1.0 })?;
    let path = dir.join("tg.sfl");
    write_field(&path, &u)?;
    let size = std::fs::metadata(&path)?.len();
    println!("{}: {size} bytes (expected {})", path.display(), encoded_len(2, 2, 16));
    let back = read_field(&path)?;
    println!("round trip exact: {}", back == u);
    println!("L² norm from file: {:.15}", sfl_norm(&back, &NormSpec::new(0.0, 2.0, 2.0)?)?);

    let cfg = ConfigFile::parse(CONFIG)?;
    let (_, report) = run_mild_solution(&cfg.run)?;
    for file in emit_solve_report(&report, &dir)? {
        println!("wrote {}", file.display());
    }

    match ConfigFile::parse("[grid]\nn = 16\nwidth = 3\n") {
        Err(e) => println!("bad config: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
