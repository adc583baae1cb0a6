//! The `fl-nse` command line.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::io::config::ConfigFile;
use crate::io::field_file::{read_field, write_field};
use crate::io::initial::{generate_initial_data, InitialData};
use crate::io::report::{emit_solve_report, emit_suite_result, fmt_f64};
use crate::lorentz::{sfl_norm, NormSpec};
use crate::solver::run_mild_solution;
use crate::spectral::Grid;
use crate::verify::run_suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fl-nse", version, about = "Mild Navier-Stokes solutions in Sobolev-Fourier-Lorentz spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write initial data to a binary field file.
    Gen {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long = "L", default_value_t = 2.0 * std::f64::consts::PI)]
        length: f64,
        #[arg(long, default_value_t = 1.0)]
        slope: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        amp: f64,
    },
    /// Print the Ḣ^s_{𝓛^{p,r}} norm of a field file.
    Norm {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        r: f64,
    },
    /// Solve from a config file and write trajectory.csv and report.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run one verification suite and write its CSV and JSON tables.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Cap rayon's worker count from `FL_NSE_THREADS` (0 or unset = automatic).
pub fn configure_threads() {
    let Ok(v) = std::env::var("FL_NSE_THREADS") else { return };
    match v.trim().parse::<usize>() {
        Ok(0) => {}
        Ok(n) => {
            if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
                log::debug!("thread pool already initialised, FL_NSE_THREADS ignored");
            }
        }
        Err(_) => log::warn!("ignoring FL_NSE_THREADS = '{v}', expected a count"),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_config_class() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERIC
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    configure_threads();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fl-nse: {e}");
            exit_code(&e)
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Gen { kind, out, n, d, length, slope, seed, amp } => {
            let grid = Grid::new(d, n, length)?;
            let data = InitialData::from_kind(&kind, slope, amp, seed)?;
            let u = generate_initial_data(&grid, &data)?;
            write_field(&out, &u)?;
            println!("wrote {} ({kind}, d = {d}, n = {n})", out.display());
            Ok(EXIT_OK)
        }
        Command::Norm { field, s, p, r } => {
            let spec = NormSpec::new(s, p, r)?;
            let u = read_field(&field)?;
            println!("{}", fmt_f64(sfl_norm(&u, &spec)?));
            Ok(EXIT_OK)
        }
        Command::Simulate { config, out_dir } => {
            let cfg = ConfigFile::load(&config)?;
            let (_, report) = run_mild_solution(&cfg.run)?;
            let files = emit_solve_report(&report, &out_dir)?;
            println!(
                "verdict {} after {} iterations, weighted sup {}, {:.2} s, wrote {}",
                report.verdict,
                report.picard.iterations,
                fmt_f64(report.picard.final_norm),
                report.wall_time_s,
                files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>().join(", ")
            );
            Ok(EXIT_OK)
        }
        Command::Verify { suite, config, out_dir } => {
            let cfg = ConfigFile::load(&config)?;
            let suite_cfg = cfg.suite_config(Some(&suite))?;
            let result = run_suite(&suite_cfg)?;
            emit_suite_result(&result, &out_dir)?;
            println!("{}", result.summary());
            for note in &result.notes {
                println!("  {note}");
            }
            Ok(if result.passed { EXIT_OK } else { EXIT_NUMERIC })
        }
    }
}
