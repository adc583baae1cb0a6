//! Line-based run and suite configuration.
//!
//! ```text
//! # comments start with '#'
//! tol_exact = 1e-12
//!
//! [grid]
//! d = 2
//! n = 32
//!
//! [norms]
//! p = 2
//! p_tilde = 3
//!
//! [suite]
//! name = holder
//! trials = 100
//! q = 3          # any other numeric key is a suite parameter
//! ```

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::initial::InitialData;
use crate::solver::RunConfig;
use crate::verify::{SuiteConfig, SuiteParams};

/// Suite settings from the `[suite]` section.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSection {
    pub name: Option<String>,
    pub trials: usize,
    pub seed: u64,
    pub params: SuiteParams,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self { name: None, trials: 20, seed: 0, params: SuiteParams::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    pub run: RunConfig,
    pub suite: SuiteSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Parser::default().parse(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::arg(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Suite configuration on the run grid. `name` overrides `[suite] name`.
    pub fn suite_config(&self, name: Option<&str>) -> Result<SuiteConfig> {
        let name = name
            .map(str::to_string)
            .or_else(|| self.suite.name.clone())
            .ok_or_else(|| Error::InvalidConfig("no suite name given".into()))?;
        let mut cfg = SuiteConfig::new(&name, self.run.dim, self.run.n, self.suite.trials, self.suite.seed);
        cfg.params = self.suite.params.clone();
        Ok(cfg)
    }
}

#[derive(Default)]
struct InitialKeys {
    kind: Option<String>,
    amp: Option<f64>,
    slope: Option<f64>,
    seed: Option<u64>,
    band: Option<i64>,
}

#[derive(Default)]
struct Parser {
    cfg: ConfigFile,
    initial: InitialKeys,
    seen: BTreeSet<(String, String)>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| err(line, format!("cannot parse value '{value}' of '{key}'")))
}

impl Parser {
    fn parse(mut self, text: &str) -> Result<ConfigFile> {
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line, format!("malformed section header '{content}'")))?
                    .trim();
                if !["grid", "norms", "time", "picard", "initial", "suite"].contains(&name) {
                    return Err(err(line, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| err(line, format!("expected 'key = value', got '{content}'")))?;
            let key = key.trim();
            let value = value.trim().trim_matches('"');
            // dotted keys address a section directly: suite.name = holder
            let (sec, key) = match key.split_once('.') {
                Some((s, k)) if section.is_empty() => (s.to_string(), k),
                _ => (section.clone(), key),
            };
            if !self.seen.insert((sec.clone(), key.to_string())) {
                return Err(err(line, format!("duplicate key '{key}'")));
            }
            self.set(line, &sec, key, value)?;
        }
        self.finish()
    }

    fn set(&mut self, line: usize, section: &str, key: &str, value: &str) -> Result<()> {
        let run = &mut self.cfg.run;
        match (section, key) {
            ("", "tol_exact") => run.tol_exact = num(line, key, value)?,
            ("", "seed") => run.seed = num(line, key, value)?,
            ("grid", "d" | "dim") => run.dim = num(line, key, value)?,
            ("grid", "n") => run.n = num(line, key, value)?,
            ("grid", "L" | "length") => run.length = num(line, key, value)?,
            ("norms", "p") => run.p = num(line, key, value)?,
            ("norms", "r") => run.r = num(line, key, value)?,
            ("norms", "p_tilde") => run.p_tilde = num(line, key, value)?,
            ("norms", "s_aux") => run.s_aux = Some(num(line, key, value)?),
            ("time", "T" | "t_final") => run.t_final = num(line, key, value)?,
            ("time", "M" | "steps") => run.steps = num(line, key, value)?,
            ("time", "gamma") => run.gamma = num(line, key, value)?,
            ("picard", "tol") => run.tol = num(line, key, value)?,
            ("picard", "max_iter") => run.max_iter = num(line, key, value)?,
            ("picard", "eta_trials") => run.eta_trials = num(line, key, value)?,
            ("picard", "t0_fraction") => run.t0_fraction = num(line, key, value)?,
            ("initial", "kind") => self.initial.kind = Some(value.to_string()),
            ("initial", "amp") => self.initial.amp = Some(num(line, key, value)?),
            ("initial", "slope") => self.initial.slope = Some(num(line, key, value)?),
            ("initial", "seed") => self.initial.seed = Some(num(line, key, value)?),
            ("initial", "band") => self.initial.band = Some(num(line, key, value)?),
            ("suite", "name") => self.cfg.suite.name = Some(value.to_string()),
            ("suite", "trials") => self.cfg.suite.trials = num(line, key, value)?,
            ("suite", "seed") => self.cfg.suite.seed = num(line, key, value)?,
            ("suite", _) => {
                let v: f64 = num(line, key, value)?;
                self.cfg.suite.params.insert(key.to_string(), v);
            }
            _ => {
                let place = if section.is_empty() { "top level".to_string() } else { format!("[{section}]") };
                return Err(err(line, format!("unknown key '{key}' in {place}")));
            }
        }
        Ok(())
    }

    fn finish(mut self) -> Result<ConfigFile> {
        let k = &self.initial;
        let kind = k.kind.as_deref().unwrap_or("taylor-green");
        let mut initial =
            InitialData::from_kind(kind, k.slope.unwrap_or(1.0), k.amp.unwrap_or(1.0), k.seed.unwrap_or(0))
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if let InitialData::RandomDivfree { band, .. } = &mut initial {
            *band = k.band;
        }
        self.cfg.run.initial = initial;
        Ok(self.cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_example() {
        let text = "\
# Taylor-Green
tol_exact = 1e-12
[grid]
d = 2
n = 16
L = 6.283185307179586
[norms]
p = 2   # critical L^2
r = 2
p_tilde = 3
[time]
T = 0.25
M = 32
gamma = 1.5
[picard]
tol = 1e-11
max_iter = 7
[initial]
kind = random-divfree
amp = 0.5
seed = 4
[suite]
name = holder
trials = 9
q = 3
";
        let c = ConfigFile::parse(text).unwrap();
        assert_eq!(c.run.n, 16);
        assert_eq!(c.run.steps, 32);
        assert_eq!(c.run.tol_exact, 1e-12);
        assert_eq!(c.run.max_iter, 7);
        assert_eq!(c.run.initial, InitialData::RandomDivfree { slope: 1.0, amp: 0.5, seed: 4, band: None });
        let s = c.suite_config(None).unwrap();
        assert_eq!((s.name.as_str(), s.trials, s.n), ("holder", 9, 16));
        assert_eq!(s.params["q"], 3.0);
        assert_eq!(c.suite_config(Some("young")).unwrap().name, "young");
    }

    #[test]
    fn dotted_keys_at_top_level() {
        let c = ConfigFile::parse("suite.name = tail\nsuite.trials = 3\n").unwrap();
        assert_eq!(c.suite.name.as_deref(), Some("tail"));
        assert_eq!(c.suite.trials, 3);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[grid]\nn = 8\nwidth = 3\n", 3),
            ("[grid]\nn = eight\n", 2),
            ("\n[nope]\n", 2),
            ("[grid\n", 1),
            ("[grid]\nn = 8\nn = 16\n", 3),
            ("just words\n", 1),
            ("[suite]\nq = fast\n", 2),
        ];
        for (text, want) in cases {
            match ConfigFile::parse(text) {
                Err(Error::Config { line, .. }) => assert_eq!(line, want, "{text}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_initial_kind() {
        assert!(matches!(ConfigFile::parse("[initial]\nkind = vortex\n"), Err(Error::InvalidConfig(_))));
    }
}
