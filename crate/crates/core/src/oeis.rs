//! OEIS sequences, solution pairs and problem records.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interp::{CarryOver, EvalConfig};
use crate::program::{Program, VarId};
use crate::syntax::{self, ParseError};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}")]
    Program {
        line: usize,
        #[source]
        source: ParseError,
    },
    #[error("no sequence data for {0}")]
    UnresolvedAnum(Anum),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// OEIS identifier, e.g. `A000045`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Anum(pub u32);

impl Anum {
    /// Short form without zero padding, as used in problem ids (`A45`).
    pub fn compact(&self) -> String {
        format!("A{}", self.0)
    }
}

impl fmt::Display for Anum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:06}", self.0)
    }
}

impl FromStr for Anum {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits = s
            .strip_prefix('A')
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| format!("invalid OEIS identifier {s:?}"))?;
        digits
            .parse()
            .map(Anum)
            .map_err(|_| format!("invalid OEIS identifier {s:?}"))
    }
}

impl TryFrom<String> for Anum {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Anum> for String {
    fn from(a: Anum) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    pub anum: Anum,
    pub terms: Vec<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionRecord {
    pub anum: Anum,
    pub small: Program,
    pub fast: Program,
}

#[derive(Debug, Clone, Default)]
pub struct SolutionSet {
    pub records: Vec<SolutionRecord>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    #[default]
    Unverified,
    Verified,
    NonVerified,
    Refuted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub id: String,
    pub anums: Vec<Anum>,
    #[serde(with = "decimal_terms")]
    pub terms: Vec<BigInt>,
    #[serde(with = "program_text")]
    pub small: Program,
    #[serde(with = "program_text")]
    pub fast: Program,
    #[serde(default)]
    pub status: Status,
    #[serde(default)]
    pub syn_pass: bool,
    #[serde(default)]
    pub sem_pass: bool,
}

impl ProblemRecord {
    pub fn new(anums: Vec<Anum>, terms: Vec<BigInt>, small: Program, fast: Program) -> Self {
        let mut anums = anums;
        anums.sort();
        anums.dedup();
        ProblemRecord {
            id: problem_id(&anums),
            anums,
            terms,
            small,
            fast,
            status: Status::Unverified,
            syn_pass: false,
            sem_pass: false,
        }
    }
}

/// Sorted compact identifiers joined by `-`.
pub fn problem_id(anums: &[Anum]) -> String {
    let mut sorted = anums.to_vec();
    sorted.sort();
    sorted
        .iter()
        .map(Anum::compact)
        .collect::<Vec<_>>()
        .join("-")
}

mod decimal_terms {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(terms: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(terms.iter().map(|t| t.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|t| t.parse().map_err(D::Error::custom))
            .collect()
    }
}

mod program_text {
    use crate::program::Program;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Program, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&crate::syntax::print(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Program, D::Error> {
        let text = String::deserialize(d)?;
        crate::syntax::parse(&text).map_err(D::Error::custom)
    }
}

fn parse_stripped_line(line: &str, lineno: usize) -> Result<SequenceRecord, DataError> {
    let malformed = |msg: String| DataError::Malformed { line: lineno, msg };
    let (head, rest) = line
        .split_once([' ', ','])
        .ok_or_else(|| malformed("missing term list".into()))?;
    let anum: Anum = head.trim().parse().map_err(malformed)?;
    let body = rest.trim().trim_start_matches(',').trim_end_matches(',');
    if body.trim().is_empty() {
        return Err(malformed(format!("{anum} has no terms")));
    }
    let terms = body
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| malformed(format!("bad term {t:?} in {anum}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SequenceRecord { anum, terms })
}

/// Reads an OEIS `stripped` dump.
pub fn parse_stripped(reader: impl BufRead) -> Result<Vec<SequenceRecord>, DataError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err(Path::new("<stripped>")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(parse_stripped_line(line, i + 1)?);
    }
    Ok(out)
}

pub fn load_stripped(path: &Path) -> Result<Vec<SequenceRecord>, DataError> {
    let f = fs::File::open(path).map_err(io_err(path))?;
    parse_stripped(BufReader::new(f))
}

/// Reads `anum<TAB>small<TAB>fast` lines. Records whose programs depend on
/// `y` are dropped with a warning; a repeated anum replaces the earlier line.
pub fn parse_solutions(reader: impl BufRead) -> Result<SolutionSet, DataError> {
    let mut set = SolutionSet::default();
    let mut index: HashMap<Anum, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(io_err(Path::new("<solutions>")))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(DataError::Malformed {
                line: lineno,
                msg: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let anum: Anum = fields[0]
            .trim()
            .parse()
            .map_err(|msg| DataError::Malformed { line: lineno, msg })?;
        let prog = |text: &str| {
            syntax::parse(text.trim()).map_err(|source| DataError::Program {
                line: lineno,
                source,
            })
        };
        let rec = SolutionRecord {
            anum,
            small: prog(fields[1])?,
            fast: prog(fields[2])?,
        };
        if rec.small.depends_on(VarId::Y) || rec.fast.depends_on(VarId::Y) {
            let w = format!("line {lineno}: {anum} rejected, program depends on y");
            log::warn!("{w}");
            set.warnings.push(w);
            continue;
        }
        match index.get(&anum) {
            Some(&at) => {
                let w = format!("line {lineno}: duplicate {anum}, replacing earlier record");
                log::warn!("{w}");
                set.warnings.push(w);
                set.records[at] = rec;
            }
            None => {
                index.insert(anum, set.records.len());
                set.records.push(rec);
            }
        }
    }
    Ok(set)
}

pub fn load_solutions(path: &Path) -> Result<SolutionSet, DataError> {
    let f = fs::File::open(path).map_err(io_err(path))?;
    parse_solutions(BufReader::new(f))
}

/// True iff `p` reproduces every term of `seq` at inputs `(0,0), (1,0), ...`
/// without an execution error.
pub fn covers(p: &Program, seq: &SequenceRecord, cfg: &EvalConfig) -> bool {
    let mut stream = CarryOver::new(cfg);
    let zero = BigInt::zero();
    seq.terms.iter().enumerate().all(
        |(i, want)| matches!(stream.call(p, &BigInt::from(i), &zero), Ok(e) if &e.value == want),
    )
}

/// Groups solutions with identical (small, fast) pairs into problems.
/// Pairs whose two programs are identical are dropped.
pub fn build_problems(
    solutions: &[SolutionRecord],
    sequences: &[SequenceRecord],
) -> Result<Vec<ProblemRecord>, DataError> {
    let by_anum: HashMap<Anum, &SequenceRecord> = sequences.iter().map(|s| (s.anum, s)).collect();
    let mut groups: HashMap<(&Program, &Program), Vec<&SequenceRecord>> = HashMap::new();
    for sol in solutions {
        let seq = *by_anum
            .get(&sol.anum)
            .ok_or(DataError::UnresolvedAnum(sol.anum))?;
        if sol.small == sol.fast {
            continue;
        }
        groups.entry((&sol.small, &sol.fast)).or_default().push(seq);
    }
    let mut out: Vec<ProblemRecord> = groups
        .into_iter()
        .map(|((small, fast), mut members)| {
            members.sort_by_key(|s| s.anum);
            members.dedup_by_key(|s| s.anum);
            let longest = members.iter().fold(members[0], |best, s| {
                if s.terms.len() > best.terms.len() {
                    s
                } else {
                    best
                }
            });
            ProblemRecord::new(
                members.iter().map(|s| s.anum).collect(),
                longest.terms.clone(),
                small.clone(),
                fast.clone(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}

pub fn write_problems(path: &Path, problems: &[ProblemRecord]) -> Result<(), DataError> {
    let mut buf = String::new();
    for p in problems {
        buf.push_str(&serde_json::to_string(p).expect("problem records serialize"));
        buf.push('\n');
    }
    fs::write(path, buf).map_err(io_err(path))
}

pub fn read_problems(path: &Path) -> Result<Vec<ProblemRecord>, DataError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| DataError::Malformed {
                line: i + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}

/// Writes ids one per line, sorted.
pub fn write_ids<S: AsRef<str>>(path: &Path, ids: &[S]) -> Result<(), DataError> {
    let mut sorted: Vec<&str> = ids.iter().map(AsRef::as_ref).collect();
    sorted.sort_unstable();
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    for id in sorted {
        writeln!(f, "{id}").map_err(io_err(path))?;
    }
    Ok(())
}

pub fn read_ids(path: &Path) -> Result<Vec<String>, DataError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn seq(anum: u32, terms: &[i64]) -> SequenceRecord {
        SequenceRecord {
            anum: Anum(anum),
            terms: terms.iter().map(|&t| BigInt::from(t)).collect(),
        }
    }

    fn sol(anum: u32, small: &str, fast: &str) -> SolutionRecord {
        SolutionRecord {
            anum: Anum(anum),
            small: parse(small).unwrap(),
            fast: parse(fast).unwrap(),
        }
    }

    #[test]
    fn anum_forms() {
        let a: Anum = "A000045".parse().unwrap();
        assert_eq!(a, Anum(45));
        assert_eq!(a.to_string(), "A000045");
        assert_eq!(a.compact(), "A45");
        assert_eq!("A1".parse::<Anum>().unwrap(), Anum(1));
        assert!("B12".parse::<Anum>().is_err());
        assert!("A".parse::<Anum>().is_err());
        assert!("A12x".parse::<Anum>().is_err());
    }

    #[test]
    fn stripped_lines() {
        let text = "# OEIS header\n# more\nA000045 ,0,1,1,2,3,5,\nA000007 ,1,0,0,\n";
        let recs = parse_stripped(text.as_bytes()).unwrap();
        assert_eq!(recs, vec![seq(45, &[0, 1, 1, 2, 3, 5]), seq(7, &[1, 0, 0])]);
        let big =
            parse_stripped("A000001 ,-3,123456789012345678901234567890,\n".as_bytes()).unwrap();
        assert_eq!(
            big[0].terms[1].to_string(),
            "123456789012345678901234567890"
        );
    }

    #[test]
    fn stripped_errors_carry_line_numbers() {
        match parse_stripped("# c\nA000001 ,,\n".as_bytes()) {
            Err(DataError::Malformed { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_stripped("A000001 ,1,x,\n".as_bytes()),
            Err(DataError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_stripped("Q1 ,1,\n".as_bytes()),
            Err(DataError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn solution_lines() {
        let text = "A000217\tloop(x + y, x, 0)\t((x * x) + x) div 2\nA1\tx\tx\n";
        let set = parse_solutions(text.as_bytes()).unwrap();
        assert_eq!(set.records.len(), 2);
        assert_eq!(
            set.records[0],
            sol(217, "loop(x + y, x, 0)", "((x * x) + x) div 2")
        );
        assert!(set.warnings.is_empty());
    }

    #[test]
    fn duplicate_solution_last_wins() {
        let text = "A5\tx\t1\nA6\t1\t2\nA5\tx + 0\tx\n";
        let set = parse_solutions(text.as_bytes()).unwrap();
        assert_eq!(set.records.len(), 2);
        assert_eq!(set.records[0], sol(5, "x + 0", "x"));
        assert_eq!(set.warnings.len(), 1);
    }

    #[test]
    fn solution_depending_on_y_is_rejected() {
        let text = "A5\tx + y\tx\nA6\tloop(y, x, 0)\tx\n";
        let set = parse_solutions(text.as_bytes()).unwrap();
        assert_eq!(set.records.len(), 1);
        assert_eq!(set.records[0].anum, Anum(6));
        assert_eq!(set.warnings.len(), 1);
    }

    #[test]
    fn solution_parse_errors() {
        assert!(matches!(
            parse_solutions("A5\tx\n".as_bytes()),
            Err(DataError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_solutions("A5\tx\t\nA6\tx +\tx\n".as_bytes()),
            Err(DataError::Program { line: 1, .. })
        ));
    }

    #[test]
    fn cover_examples() {
        let cfg = EvalConfig::default();
        let tri = parse("loop(x + y, x, 0)").unwrap();
        assert!(covers(&tri, &seq(217, &[0, 1, 3, 6, 10]), &cfg));
        assert!(covers(&Program::Const0, &seq(4, &[0, 0, 0]), &cfg));
        assert!(!covers(&Program::Const0, &seq(4, &[0, 1]), &cfg));
        // an execution error is never a cover
        assert!(!covers(
            &parse("1 div (1 - x)").unwrap(),
            &seq(9, &[1, 0]),
            &cfg
        ));
    }

    #[test]
    fn grouping() {
        let seqs = vec![
            seq(45, &[0, 1, 1, 2, 3]),
            seq(77373, &[0, 1, 1, 2, 3, 5, 8]),
            seq(1, &[1, 1]),
        ];
        let sols = vec![
            sol(
                77373,
                "loop2(x + y, x, x, 0, 1)",
                "cond(x, 0, loop2(x + y, x, x - 2, 1, 1))",
            ),
            sol(
                45,
                "loop2(x + y, x, x, 0, 1)",
                "cond(x, 0, loop2(x + y, x, x - 2, 1, 1))",
            ),
            sol(1, "1", "1"),
        ];
        let probs = build_problems(&sols, &seqs).unwrap();
        assert_eq!(probs.len(), 1);
        assert_eq!(probs[0].id, "A45-A77373");
        assert_eq!(probs[0].anums, vec![Anum(45), Anum(77373)]);
        assert_eq!(probs[0].terms.len(), 7);
    }

    #[test]
    fn distinct_pairs_stay_separate() {
        let seqs = vec![seq(1, &[0]), seq(2, &[0]), seq(3, &[0])];
        let sols = vec![
            sol(3, "x", "x * x"),
            sol(1, "x", "x * 2"),
            sol(2, "0", "x - x"),
        ];
        let probs = build_problems(&sols, &seqs).unwrap();
        let ids: Vec<&str> = probs.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, vec!["A1", "A2", "A3"]);
    }

    #[test]
    fn unresolved_anum() {
        assert!(matches!(
            build_problems(&[sol(9, "x", "1")], &[]),
            Err(DataError::UnresolvedAnum(Anum(9)))
        ));
    }

    #[test]
    fn problem_json_round_trip() {
        let mut p = ProblemRecord::new(
            vec![Anum(217)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(3)],
            parse("loop(x + y, x, 0)").unwrap(),
            parse("((x * x) + x) div 2").unwrap(),
        );
        p.status = Status::NonVerified;
        let line = serde_json::to_string(&p).unwrap();
        assert_eq!(
            line,
            r#"{"id":"A217","anums":["A000217"],"terms":["0","1","3"],"small":"loop(x + y, x, 0)","fast":"((x * x) + x) div 2","status":"non_verified","syn_pass":false,"sem_pass":false}"#
        );
        let back: ProblemRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, p);
    }
}
