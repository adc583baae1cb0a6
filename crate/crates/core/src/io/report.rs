//! CSV and JSON report files. Floats are written with 17 significant
//! digits so they parse back to the same `f64`; non-finite JSON numbers
//! become `null`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::error::{Error, Result};
use crate::solver::{SolveReport, SweepReport, TrajectoryRow};
use crate::verify::SuiteResult;

pub const TRAJECTORY_HEADER: &str = "t,weighted_norm,critical_norm,div_residual";
pub const SUITE_HEADER: &str = "trial,n,x,value";

/// `{:.16e}`: one digit before the point and 16 after.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut s = String::from(TRAJECTORY_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.weighted_norm),
            fmt_f64(r.critical_norm),
            fmt_f64(r.div_residual)
        );
    }
    s
}

pub fn suite_csv(result: &SuiteResult) -> String {
    let mut s = String::from(SUITE_HEADER);
    s.push('\n');
    for r in &result.rows {
        let _ = writeln!(s, "{},{},{},{}", r.trial, r.n, fmt_f64(r.x), fmt_f64(r.value));
    }
    s
}

/// Parse a trajectory CSV back into rows.
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<TrajectoryRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRAJECTORY_HEADER) {
        return Err(Error::Format("trajectory CSV header mismatch".into()));
    }
    lines
        .map(|line| {
            let v = line
                .split(',')
                .map(|x| x.parse::<f64>().map_err(|_| Error::Format(format!("bad number '{x}'"))))
                .collect::<Result<Vec<_>>>()?;
            match v[..] {
                [t, weighted_norm, critical_norm, div_residual] => {
                    Ok(TrajectoryRow { t, weighted_norm, critical_norm, div_residual })
                }
                _ => Err(Error::Format(format!("expected 4 columns, got '{line}'"))),
            }
        })
        .collect()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::arg(format!("cannot create output directory {}: {e}", dir.display())))
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::arg(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// `trajectory.csv` and `report.json` in `dir`.
pub fn emit_solve_report(report: &SolveReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    Ok(vec![
        write(dir.join("trajectory.csv"), &trajectory_csv(&report.table))?,
        write(dir.join("report.json"), &to_json(report)?)?,
    ])
}

/// `<name>.csv` and `<name>.json` in `dir`.
pub fn emit_suite_result(result: &SuiteResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    Ok(vec![
        write(dir.join(format!("{}.csv", result.name)), &suite_csv(result))?,
        write(dir.join(format!("{}.json", result.name)), &to_json(result)?)?,
    ])
}

pub fn emit_sweep_report(report: &SweepReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    ensure_dir(dir)?;
    Ok(vec![write(dir.join("sweep.json"), &to_json(report)?)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{SuiteConfig, SuiteRow};

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        let row = TrajectoryRow { t: 0.1, weighted_norm: 1.0 / 3.0, critical_norm: 2.0f64.sqrt(), div_residual: 0.0 };
        let csv = trajectory_csv(&[row]);
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(parse_trajectory_csv(&csv).unwrap(), vec![row]);
    }

    #[test]
    fn json_uses_seventeen_digits_and_null() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: f64,
            c: Option<f64>,
        }
        let s = to_json(&S { a: 0.1, b: f64::INFINITY, c: Some(f64::NAN) }).unwrap();
        assert_eq!(s.trim(), r#"{"a":1.0000000000000001e-1,"b":null,"c":null}"#);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn empty_suite_has_header_only() {
        let cfg = SuiteConfig::new("tail", 2, 32, 0, 0);
        let r = crate::verify::run_suite(&cfg).unwrap();
        assert_eq!(suite_csv(&SuiteResult { rows: vec![], ..r.clone() }), format!("{SUITE_HEADER}\n"));
        let mut one = r;
        one.rows = vec![SuiteRow { trial: 0, n: 8, x: 1.5, value: 2.0 }];
        assert_eq!(suite_csv(&one).lines().nth(1), Some("0,8,1.5000000000000000e0,2.0000000000000000e0"));
    }
}
