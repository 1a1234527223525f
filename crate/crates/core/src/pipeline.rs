//! The whole build, verify and filter sequence over in-memory data, with the
//! count of survivors at each stage.

use rayon::prelude::*;
use serde::Serialize;

use crate::induction::{classify_all, FilterMode};
use crate::interp::EvalConfig;
use crate::oeis::{
    build_problems, covers, DataError, ProblemRecord, SequenceRecord, SolutionRecord, Status,
};
use crate::verify::{verify_all, VerifyReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Funnel {
    pub pairs: usize,
    pub covering: usize,
    pub problems: usize,
    pub verified: usize,
    pub nonverified: usize,
    pub refuted: usize,
    pub syn: usize,
    pub sem: usize,
}

impl Funnel {
    pub fn rows(&self) -> [(&'static str, usize); 8] {
        [
            ("pairs", self.pairs),
            ("covering pairs", self.covering),
            ("unique problems", self.problems),
            ("verified", self.verified),
            ("nonverified", self.nonverified),
            ("refuted", self.refuted),
            ("syntactic filter", self.syn),
            ("semantic filter", self.sem),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub check: EvalConfig,
    pub verify: EvalConfig,
    pub mode: FilterMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            check: EvalConfig::default(),
            verify: EvalConfig::verification(),
            mode: FilterMode::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Every problem, with status and filter flags set.
    pub problems: Vec<ProblemRecord>,
    pub reports: Vec<VerifyReport>,
    pub funnel: Funnel,
}

impl PipelineOutput {
    fn ids(&self, keep: impl Fn(&ProblemRecord) -> bool) -> Vec<String> {
        self.problems
            .iter()
            .filter(|p| keep(p))
            .map(|p| p.id.clone())
            .collect()
    }

    pub fn verified_ids(&self) -> Vec<String> {
        self.ids(|p| p.status == Status::Verified)
    }

    pub fn nonverified_ids(&self) -> Vec<String> {
        self.ids(|p| p.status == Status::NonVerified)
    }

    pub fn syn_ids(&self) -> Vec<String> {
        self.ids(|p| p.status == Status::Verified && p.syn_pass)
    }

    pub fn sem_ids(&self) -> Vec<String> {
        self.ids(|p| p.status == Status::Verified && p.sem_pass)
    }
}

/// Pairs whose two programs both reproduce their sequence's terms.
pub fn covering_pairs(
    solutions: &[SolutionRecord],
    sequences: &[SequenceRecord],
    cfg: &EvalConfig,
) -> Result<Vec<SolutionRecord>, DataError> {
    let by_anum: std::collections::HashMap<_, _> = sequences.iter().map(|s| (s.anum, s)).collect();
    solutions
        .par_iter()
        .filter_map(|s| match by_anum.get(&s.anum) {
            None => Some(Err(DataError::UnresolvedAnum(s.anum))),
            Some(seq) if covers(&s.small, seq, cfg) && covers(&s.fast, seq, cfg) => {
                Some(Ok(s.clone()))
            }
            Some(_) => {
                log::warn!(
                    "{}: solution pair does not cover the sequence, dropped",
                    s.anum
                );
                None
            }
        })
        .collect()
}

/// Builds, verifies and classifies. Filters are only meaningful on verified
/// problems, so the filter counts are restricted to those.
pub fn run_pipeline(
    solutions: &[SolutionRecord],
    sequences: &[SequenceRecord],
    cfg: &PipelineConfig,
) -> Result<PipelineOutput, DataError> {
    let covering = covering_pairs(solutions, sequences, &cfg.check)?;
    let mut problems = build_problems(&covering, sequences)?;
    let reports = verify_all(&problems, &cfg.verify);
    for (p, r) in problems.iter_mut().zip(&reports) {
        p.status = r.status;
    }
    classify_all(&mut problems, cfg.mode, &cfg.check);
    let count = |s: Status| problems.iter().filter(|p| p.status == s).count();
    let verified = || problems.iter().filter(|p| p.status == Status::Verified);
    let funnel = Funnel {
        pairs: solutions.len(),
        covering: covering.len(),
        problems: problems.len(),
        verified: count(Status::Verified),
        nonverified: count(Status::NonVerified),
        refuted: count(Status::Refuted),
        syn: verified().filter(|p| p.syn_pass).count(),
        sem: verified().filter(|p| p.sem_pass).count(),
    };
    Ok(PipelineOutput {
        problems,
        reports,
        funnel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn seq(anum: u32, terms: &[i64]) -> SequenceRecord {
        SequenceRecord {
            anum: crate::oeis::Anum(anum),
            terms: terms.iter().map(|&t| t.into()).collect(),
        }
    }

    fn sol(anum: u32, small: &str, fast: &str) -> SolutionRecord {
        SolutionRecord {
            anum: crate::oeis::Anum(anum),
            small: parse(small).unwrap(),
            fast: parse(fast).unwrap(),
        }
    }

    #[test]
    fn funnel_counts() {
        let seqs = [
            seq(217, &[0, 1, 3, 6, 10]),
            seq(5, &[0, 2, 4, 6]),
            seq(6, &[0, 1, 4]),
        ];
        let sols = [
            sol(217, "loop(x + y, x, 0)", "((x * x) + x) div 2"),
            sol(5, "x + x", "x * 2"),
            // does not cover: fast gives 0, 1, 2
            sol(6, "x * x", "x"),
        ];
        let out = run_pipeline(&sols, &seqs, &PipelineConfig::default()).unwrap();
        let f = out.funnel;
        assert_eq!((f.pairs, f.covering, f.problems, f.verified), (3, 2, 2, 2));
        assert_eq!((f.syn, f.sem), (1, 1));
        assert_eq!(out.syn_ids(), ["A217"]);
        assert_eq!(out.verified_ids(), ["A217", "A5"]);
    }

    #[test]
    fn unknown_anum_is_an_error() {
        let sols = [sol(9, "x", "x + 0")];
        assert!(run_pipeline(&sols, &[], &PipelineConfig::default()).is_err());
    }
}
