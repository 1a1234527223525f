//! Running external solvers over exported scripts and tabulating results.

mod report;
mod run;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use report::{aggregate, Anomaly, Manifests, ReportRow, ReportTable, RowKind};
pub use run::{read_log, run, Job};

pub const FILE_PLACEHOLDER: &str = "{file}";
pub const DEFAULT_TIMEOUT_SECS: u64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Proved,
    CounterSat,
    Unknown,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub id: String,
    pub solver: String,
    pub variant: String,
    pub verdict: Verdict,
    pub wall_secs: f64,
}

impl RunResult {
    pub fn key(&self) -> (String, String, String) {
        (self.id.clone(), self.solver.clone(), self.variant.clone())
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver config: {0}")]
    Config(String),
    #[error("solver `{solver}`: cannot find executable `{program}`")]
    MissingBinary { solver: String, program: String },
    #[error("results mention unknown problem ids: {}", .0.join(", "))]
    Orphans(Vec<String>),
    #[error("{inner} is not a subset of {outer}: {}", .missing.join(", "))]
    NotSubset {
        inner: &'static str,
        outer: &'static str,
        missing: Vec<String>,
    },
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError {
    let path = path.to_path_buf();
    move |source| HarnessError::Io { path, source }
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_SECS
}

fn default_tokens() -> BTreeMap<String, Verdict> {
    [
        ("unsat", Verdict::Proved),
        ("sat", Verdict::CounterSat),
        ("unknown", Verdict::Unknown),
        ("timeout", Verdict::Timeout),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// One solver invocation recipe. `command` is split on whitespace and must
/// contain `{file}` exactly once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub name: String,
    pub command: String,
    #[serde(default = "default_timeout")]
    pub timeout: u64,
    /// Trimmed stdout lines mapped to verdicts; the first matching line wins.
    #[serde(default = "default_tokens")]
    pub tokens: BTreeMap<String, Verdict>,
}

impl SolverSpec {
    pub fn new(name: impl Into<String>, command: impl Into<String>) -> Result<Self, HarnessError> {
        let spec = SolverSpec {
            name: name.into(),
            command: command.into(),
            timeout: DEFAULT_TIMEOUT_SECS,
            tokens: default_tokens(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_timeout(mut self, secs: u64) -> Self {
        self.timeout = secs;
        self
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let n = self.command.matches(FILE_PLACEHOLDER).count();
        if n != 1 {
            return Err(HarnessError::Config(format!(
                "`{}`: command must contain {FILE_PLACEHOLDER} exactly once, found {n}",
                self.name
            )));
        }
        if self
            .command
            .split_whitespace()
            .next()
            .is_none_or(|p| p.contains(FILE_PLACEHOLDER))
        {
            return Err(HarnessError::Config(format!(
                "`{}`: command names no program",
                self.name
            )));
        }
        if self.timeout == 0 {
            return Err(HarnessError::Config(format!(
                "`{}`: timeout must be positive",
                self.name
            )));
        }
        Ok(())
    }

    pub fn argv(&self, file: &Path) -> Vec<String> {
        let file = file.to_string_lossy();
        self.command
            .split_whitespace()
            .map(|w| w.replace(FILE_PLACEHOLDER, &file))
            .collect()
    }

    pub fn verdict_from_stdout(&self, stdout: &str) -> Option<Verdict> {
        stdout
            .lines()
            .find_map(|l| self.tokens.get(l.trim()).copied())
    }
}

#[derive(Debug, Deserialize)]
struct SolverFile {
    #[serde(default)]
    solver: Vec<SolverSpec>,
}

pub fn parse_solvers(text: &str) -> Result<Vec<SolverSpec>, HarnessError> {
    let file: SolverFile = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    if file.solver.is_empty() {
        return Err(HarnessError::Config("no [[solver]] entries".into()));
    }
    for s in &file.solver {
        s.validate()?;
    }
    let mut names: Vec<&str> = file.solver.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(HarnessError::Config(format!(
            "solver `{}` listed twice",
            w[0]
        )));
    }
    Ok(file.solver)
}

pub fn load_solvers(path: &Path) -> Result<Vec<SolverSpec>, HarnessError> {
    parse_solvers(&fs::read_to_string(path).map_err(io_err(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults() {
        let s =
            parse_solvers("[[solver]]\nname = \"z3\"\ncommand = \"z3 -smt2 {file}\"\n").unwrap();
        assert_eq!(s[0].timeout, 60);
        assert_eq!(s[0].tokens["unsat"], Verdict::Proved);
        assert_eq!(
            s[0].argv(Path::new("/p/a.smt2")),
            ["z3", "-smt2", "/p/a.smt2"]
        );
    }

    #[test]
    fn custom_tokens() {
        let text =
            "[[solver]]\nname = \"v\"\ncommand = \"vampire --input_file={file}\"\ntimeout = 5\n\
                    [solver.tokens]\n\"% SZS status Unsatisfiable\" = \"proved\"\n";
        let s = &parse_solvers(text).unwrap()[0];
        assert_eq!(s.argv(Path::new("f")), ["vampire", "--input_file=f"]);
        assert_eq!(
            s.verdict_from_stdout("banner\n  % SZS status Unsatisfiable \n"),
            Some(Verdict::Proved)
        );
        assert_eq!(s.verdict_from_stdout("unsat\n"), None);
    }

    #[test]
    fn placeholder_must_occur_once() {
        assert!(SolverSpec::new("a", "z3").is_err());
        assert!(SolverSpec::new("a", "z3 {file} {file}").is_err());
        assert!(SolverSpec::new("a", "{file}").is_err());
        assert!(
            parse_solvers("[[solver]]\nname = \"a\"\ncommand = \"a {file}\"\ntimeout = 0\n")
                .is_err()
        );
        let dup = "[[solver]]\nname = \"a\"\ncommand = \"a {file}\"\n[[solver]]\nname = \"a\"\ncommand = \"b {file}\"\n";
        assert!(parse_solvers(dup).is_err());
    }

    #[test]
    fn exact_line_matching() {
        let s = SolverSpec::new("z3", "z3 {file}").unwrap();
        assert_eq!(s.verdict_from_stdout("unsat\n"), Some(Verdict::Proved));
        assert_eq!(
            s.verdict_from_stdout("  sat  \n"),
            Some(Verdict::CounterSat)
        );
        assert_eq!(
            s.verdict_from_stdout("unsatisfiable\nsat\n"),
            Some(Verdict::CounterSat)
        );
        assert_eq!(s.verdict_from_stdout("z3 says unsat\n"), None);
    }

    #[test]
    fn verdict_json() {
        assert_eq!(
            serde_json::to_string(&Verdict::CounterSat).unwrap(),
            "\"counter_sat\""
        );
    }
}
