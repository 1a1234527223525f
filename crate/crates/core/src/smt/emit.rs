use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use super::lower::{lower, LowerError, LoweredDef};
use super::term::Term;
use crate::oeis::ProblemRecord;
use crate::syntax::{print_with, CondStyle};

pub const LOGIC: &str = "UFNIA";
/// Terms listed in the header comment.
pub const HEADER_TERMS: usize = 20;
/// Largest successor strengthening.
pub const MAX_SUCC: u8 = 8;

/// Shape of the negated conjecture.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum ConjectureVariant {
    /// Equality at `c`.
    #[default]
    Base,
    /// Equality at `c, c+1, ..., c+k`.
    Succ(u8),
    /// Equality at `2c` and `2c+1`.
    TwoX,
    /// Equality at `c` assuming it below `c`.
    StrongInd,
}

impl fmt::Display for ConjectureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConjectureVariant::Base => f.write_str("base"),
            ConjectureVariant::Succ(k) => write!(f, "c{k}"),
            ConjectureVariant::TwoX => f.write_str("c2x"),
            ConjectureVariant::StrongInd => f.write_str("strong"),
        }
    }
}

impl FromStr for ConjectureVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "base" => return Ok(ConjectureVariant::Base),
            "c2x" => return Ok(ConjectureVariant::TwoX),
            "strong" => return Ok(ConjectureVariant::StrongInd),
            _ => {}
        }
        lower
            .strip_prefix('c')
            .and_then(|k| k.parse::<u8>().ok())
            .filter(|&k| k <= MAX_SUCC)
            .map(ConjectureVariant::Succ)
            .ok_or_else(|| format!("unknown conjecture variant {s:?} (base, c0..c8, c2x, strong)"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExportOptions {
    pub variant: ConjectureVariant,
    /// Use `2(c+1)` instead of `2c+1` as the second point of [`ConjectureVariant::TwoX`].
    pub c2x_appendix: bool,
    /// How `cond` is printed in the header comments.
    pub header_style: CondStyle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmtScript {
    pub header: Vec<String>,
    pub logic: String,
    pub declarations: Vec<(String, usize)>,
    pub definitions: Vec<LoweredDef>,
    pub conjecture: Term,
}

fn small_fast_eq(at: &Term) -> Term {
    Term::app(
        "=",
        vec![
            Term::app("small", vec![at.clone()]),
            Term::app("fast", vec![at.clone()]),
        ],
    )
}

fn differs(at: Term) -> Term {
    Term::app("not", vec![small_fast_eq(&at)])
}

/// Body of the existential counterexample assertion.
pub fn negated_conjecture(variant: ConjectureVariant, c2x_appendix: bool) -> Term {
    let c = || Term::sym("c");
    let nonneg = Term::app(">=", vec![c(), Term::int(0)]);
    let claim = match variant {
        ConjectureVariant::Base | ConjectureVariant::Succ(0) => vec![differs(c())],
        ConjectureVariant::Succ(k) => {
            let disjuncts = (0..=k as u64)
                .rev()
                .map(|i| {
                    if i == 0 {
                        differs(c())
                    } else {
                        differs(Term::app("+", vec![c(), Term::int(i)]))
                    }
                })
                .collect();
            vec![Term::app("or", disjuncts)]
        }
        ConjectureVariant::TwoX => {
            let even = Term::app("*", vec![c(), Term::int(2)]);
            let second = if c2x_appendix {
                Term::app(
                    "*",
                    vec![Term::int(2), Term::app("+", vec![c(), Term::int(1)])],
                )
            } else {
                Term::app("+", vec![even.clone(), Term::int(1)])
            };
            vec![Term::app("or", vec![differs(even), differs(second)])]
        }
        ConjectureVariant::StrongInd => {
            let d = || Term::sym("d");
            let below = Term::app(
                "and",
                vec![
                    Term::app("<=", vec![Term::int(0), d()]),
                    Term::app("<", vec![d(), c()]),
                ],
            );
            let hyp = Term::app(
                "forall",
                vec![
                    Term::int_binders(&["d"]),
                    Term::app("=>", vec![below, small_fast_eq(&d())]),
                ],
            );
            vec![hyp, differs(c())]
        }
    };
    let mut conj = vec![nonneg];
    conj.extend(claim);
    Term::app(
        "exists",
        vec![Term::int_binders(&["c"]), Term::app("and", conj)],
    )
}

pub fn build_script(
    problem: &ProblemRecord,
    opts: &ExportOptions,
) -> Result<SmtScript, LowerError> {
    let lowered = lower(&problem.small, &problem.fast)?;
    let ids = problem
        .anums
        .iter()
        .map(|a| a.compact())
        .collect::<Vec<_>>()
        .join("-");
    let terms = problem
        .terms
        .iter()
        .take(HEADER_TERMS)
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let header = vec![
        format!("sequence(s): {ids}"),
        format!("terms: {terms}"),
        format!(
            "small program: {}",
            print_with(&problem.small, opts.header_style)
        ),
        format!(
            "fast program: {}",
            print_with(&problem.fast, opts.header_style)
        ),
    ];
    let definitions: Vec<LoweredDef> = lowered.defs().cloned().collect();
    let declarations = definitions
        .iter()
        .map(|d| (d.name.clone(), d.arity()))
        .collect();
    Ok(SmtScript {
        header,
        logic: LOGIC.to_string(),
        declarations,
        definitions,
        conjecture: negated_conjecture(opts.variant, opts.c2x_appendix),
    })
}

fn definition_assert(d: &LoweredDef) -> String {
    let head = Term::app(
        d.name.clone(),
        d.params.iter().map(|&p| Term::sym(p)).collect(),
    );
    if d.params.is_empty() {
        format!("(assert (= {head} {}))", d.body)
    } else {
        let binders: Vec<String> = d.params.iter().map(|p| format!("({p} Int)")).collect();
        format!(
            "(assert (forall ({}) (= {head} {})))",
            binders.join(" "),
            d.body
        )
    }
}

impl SmtScript {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.header {
            out.push_str(";; ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&format!("(set-logic {})\n", self.logic));
        for (name, arity) in &self.declarations {
            let sorts = vec!["Int"; *arity].join(" ");
            out.push_str(&format!("(declare-fun {name} ({sorts}) Int)\n"));
        }
        for d in &self.definitions {
            out.push_str(&definition_assert(d));
            out.push('\n');
        }
        out.push_str(&format!("(assert {})\n", self.conjecture));
        out.push_str("(check-sat)\n");
        out
    }
}

/// Lowers and renders one problem.
pub fn emit(problem: &ProblemRecord, opts: &ExportOptions) -> Result<String, LowerError> {
    Ok(build_script(problem, opts)?.render())
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{id}")]
    Lower {
        id: String,
        #[source]
        source: LowerError,
    },
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Name of the index written next to the exported scripts.
pub const MANIFEST: &str = "manifest.tsv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub file: String,
}

/// Writes `<id>.smt2` for every problem plus a `manifest.tsv` of
/// `id<TAB>file` lines, in problem order.
pub fn export_all(
    problems: &[ProblemRecord],
    outdir: &Path,
    opts: &ExportOptions,
) -> Result<Vec<ManifestEntry>, ExportError> {
    use rayon::prelude::*;
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExportError::Io { path, source }
    };
    fs::create_dir_all(outdir).map_err(io(outdir))?;
    let entries = problems
        .par_iter()
        .map(|p| {
            let text = emit(p, opts).map_err(|source| ExportError::Lower {
                id: p.id.clone(),
                source,
            })?;
            let file = format!("{}.smt2", p.id);
            let path = outdir.join(&file);
            fs::write(&path, text).map_err(io(&path))?;
            Ok(ManifestEntry {
                id: p.id.clone(),
                file,
            })
        })
        .collect::<Result<Vec<_>, ExportError>>()?;
    let manifest: String = entries
        .iter()
        .map(|e| format!("{}\t{}\n", e.id, e.file))
        .collect();
    let path = outdir.join(MANIFEST);
    fs::write(&path, manifest).map_err(io(&path))?;
    Ok(entries)
}

/// Reads a manifest written by [`export_all`].
pub fn read_manifest(outdir: &Path) -> Result<Vec<ManifestEntry>, ExportError> {
    let path = outdir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|source| ExportError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('\t'))
        .map(|(id, file)| ManifestEntry {
            id: id.to_string(),
            file: file.to_string(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names() {
        for (s, v) in [
            ("base", ConjectureVariant::Base),
            ("c1", ConjectureVariant::Succ(1)),
            ("C8", ConjectureVariant::Succ(8)),
            ("c2x", ConjectureVariant::TwoX),
            ("strong", ConjectureVariant::StrongInd),
        ] {
            assert_eq!(s.parse::<ConjectureVariant>(), Ok(v));
        }
        assert!("c9".parse::<ConjectureVariant>().is_err());
        assert!("cx".parse::<ConjectureVariant>().is_err());
        assert_eq!(ConjectureVariant::Succ(3).to_string(), "c3");
    }

    #[test]
    fn conjectures() {
        assert_eq!(
            negated_conjecture(ConjectureVariant::Base, false).to_string(),
            "(exists ((c Int)) (and (>= c 0) (not (= (small c) (fast c)))))"
        );
        assert_eq!(
            negated_conjecture(ConjectureVariant::Succ(0), false),
            negated_conjecture(ConjectureVariant::Base, false)
        );
        assert_eq!(
            negated_conjecture(ConjectureVariant::Succ(2), false).to_string(),
            "(exists ((c Int)) (and (>= c 0) (or (not (= (small (+ c 2)) (fast (+ c 2)))) \
             (not (= (small (+ c 1)) (fast (+ c 1)))) (not (= (small c) (fast c))))))"
        );
        assert_eq!(
            negated_conjecture(ConjectureVariant::TwoX, false).to_string(),
            "(exists ((c Int)) (and (>= c 0) (or (not (= (small (* c 2)) (fast (* c 2)))) \
             (not (= (small (+ (* c 2) 1)) (fast (+ (* c 2) 1)))))))"
        );
        assert_eq!(
            negated_conjecture(ConjectureVariant::StrongInd, false).to_string(),
            "(exists ((c Int)) (and (>= c 0) (forall ((d Int)) (=> (and (<= 0 d) (< d c)) \
             (= (small d) (fast d)))) (not (= (small c) (fast c)))))"
        );
    }
}
