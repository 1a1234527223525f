//! Filters that flag problems likely to need induction.
//!
//! A problem is examined through its top-level loops: looping subprograms
//! not nested inside another looping subprogram whose exact form occurs only
//! once across both sides of the equation. The syntactic test asks that the
//! loop's bound and bodies depend on the right variables; the semantic test
//! runs them and rejects outputs that are periodic.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::interp::{run_series, EvalConfig};
use crate::oeis::ProblemRecord;
use crate::program::{Program, TreePath, VarId};

/// Length of the output window examined for cycles.
pub const WINDOW_LEN: usize = 40;
/// First index of the window that is inspected.
pub const WINDOW_SKIP: usize = 9;
/// Largest period searched for.
pub const MAX_PERIOD: usize = 15;
/// The other variable sweeps `0..=SWEEP_MAX`.
pub const SWEEP_MAX: i64 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Small,
    Fast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopLoop {
    pub subprogram: Program,
    pub side: Side,
    pub path: TreePath,
}

/// How "passes all tests" combines over the selected loops.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FilterMode {
    /// One loop must pass every test.
    #[default]
    PerLoop,
    /// Each test must be passed by some loop, not necessarily the same one.
    PerTest,
}

impl FromStr for FilterMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "per-loop" => Ok(FilterMode::PerLoop),
            "per-test" => Ok(FilterMode::PerTest),
            _ => Err(format!(
                "unknown filter mode {s:?} (expected per-loop or per-test)"
            )),
        }
    }
}

fn outermost_loops<'a>(
    p: &'a Program,
    path: &mut TreePath,
    out: &mut Vec<(&'a Program, TreePath)>,
) {
    if p.is_looping() {
        out.push((p, path.clone()));
        return;
    }
    for (i, c) in p.children().into_iter().enumerate() {
        path.push(i);
        outermost_loops(c, path, out);
        path.pop();
    }
}

pub fn select_top_loops(small: &Program, fast: &Program) -> Vec<TopLoop> {
    let mut out = Vec::new();
    for (side, prog) in [(Side::Small, small), (Side::Fast, fast)] {
        let mut found = Vec::new();
        outermost_loops(prog, &mut Vec::new(), &mut found);
        for (sub, path) in found {
            if small.count_occurrences(sub) + fast.count_occurrences(sub) == 1 {
                out.push(TopLoop {
                    subprogram: sub.clone(),
                    side,
                    path,
                });
            }
        }
    }
    out
}

pub fn syntactic_test(t: &TopLoop) -> bool {
    use VarId::{X, Y};
    match &t.subprogram {
        Program::Loop(f, a, _) => a.depends_on(X) && f.depends_on(X),
        Program::Loop2(f, g, a, _, _) => {
            a.depends_on(X)
                && ((f.depends_on(X) && f.depends_on(Y)) || (g.depends_on(X) && g.depends_on(Y)))
        }
        Program::Compr(_, a) => a.depends_on(X),
        _ => false,
    }
}

/// True iff `a_9..a_39` has no period `p` in `1..=15`.
pub fn is_acyclic_window(w: &[BigInt]) -> bool {
    assert_eq!(
        w.len(),
        WINDOW_LEN,
        "cycle window must hold {WINDOW_LEN} values"
    );
    let tail = &w[WINDOW_SKIP..];
    !(1..=MAX_PERIOD).any(|p| tail.iter().zip(&tail[p..]).all(|(a, b)| a == b))
}

/// Runs `p` along `axis` for 40 steps while the other variable takes each of
/// `0..=9`; every window must be producible and acyclic.
pub fn acyclic_on(p: &Program, axis: VarId, map_neg_to_zero: bool, cfg: &EvalConfig) -> bool {
    (0..=SWEEP_MAX).all(|other| {
        let other = BigInt::from(other);
        let inputs = (0..WINDOW_LEN).map(|i| {
            let i = BigInt::from(i);
            match axis {
                VarId::X => (i, other.clone()),
                VarId::Y => (other.clone(), i),
            }
        });
        let out = run_series(p, inputs, cfg);
        if out.len() != WINDOW_LEN || out.iter().any(Result::is_err) {
            return false;
        }
        let window: Vec<BigInt> = out
            .into_iter()
            .map(|r| {
                let v = r.expect("checked above").value;
                if map_neg_to_zero && v.is_negative() {
                    BigInt::zero()
                } else {
                    v
                }
            })
            .collect();
        is_acyclic_window(&window)
    })
}

pub fn semantic_test(t: &TopLoop, cfg: &EvalConfig) -> bool {
    use VarId::{X, Y};
    let whole = || acyclic_on(&t.subprogram, X, false, cfg);
    match &t.subprogram {
        Program::Loop(f, a, _) => {
            acyclic_on(a, X, true, cfg) && acyclic_on(f, X, false, cfg) && whole()
        }
        Program::Loop2(f, g, a, _, _) => {
            let both = |q: &Program| acyclic_on(q, X, false, cfg) && acyclic_on(q, Y, false, cfg);
            acyclic_on(a, X, true, cfg) && (both(f) || both(g)) && whole()
        }
        Program::Compr(_, a) => acyclic_on(a, X, true, cfg) && whole(),
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub syn_pass: bool,
    pub sem_pass: bool,
}

pub fn classify_pair(
    small: &Program,
    fast: &Program,
    mode: FilterMode,
    cfg: &EvalConfig,
) -> Classification {
    let loops = select_top_loops(small, fast);
    let syn: Vec<bool> = loops.iter().map(syntactic_test).collect();
    let syn_pass = syn.iter().any(|&s| s);
    let sem_pass = match mode {
        FilterMode::PerLoop => loops
            .iter()
            .zip(&syn)
            .any(|(t, &s)| s && semantic_test(t, cfg)),
        FilterMode::PerTest => syn_pass && loops.iter().any(|t| semantic_test(t, cfg)),
    };
    Classification { syn_pass, sem_pass }
}

pub fn classify(problem: &ProblemRecord, mode: FilterMode, cfg: &EvalConfig) -> Classification {
    classify_pair(&problem.small, &problem.fast, mode, cfg)
}

/// Classifies every problem in parallel and records the flags on it.
pub fn classify_all(problems: &mut [ProblemRecord], mode: FilterMode, cfg: &EvalConfig) {
    use rayon::prelude::*;
    problems.par_iter_mut().for_each(|p| {
        let c = classify(p, mode, cfg);
        p.syn_pass = c.syn_pass;
        p.sem_pass = c.sem_pass;
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(text: &str) -> Program {
        parse(text).unwrap()
    }

    fn window(f: impl Fn(i64) -> i64) -> Vec<BigInt> {
        (0..40).map(|i| BigInt::from(f(i))).collect()
    }

    #[test]
    fn top_loop_selection() {
        let tops = select_top_loops(&p("loop(x + y, x, 0)"), &p("((x * x) + x) div 2"));
        assert_eq!(tops.len(), 1);
        assert_eq!(tops[0].side, Side::Small);
        assert!(tops[0].path.is_empty());

        // the same loop on both sides occurs twice
        let tops = select_top_loops(&p("loop(x + y, x, 0) + 1"), &p("1 + loop(x + y, x, 0)"));
        assert!(tops.is_empty());

        // a loop inside another loop's bound is not top-level
        let tops = select_top_loops(&p("loop(x + y, loop(x * 2, x, 1), 0)"), &p("x"));
        assert_eq!(tops.len(), 1);
        assert_eq!(tops[0].subprogram, p("loop(x + y, loop(x * 2, x, 1), 0)"));

        // an outer loop repeated as a nested subterm elsewhere is excluded
        let tops = select_top_loops(&p("loop(x, x, 0)"), &p("loop(y, loop(x, x, 0), 1)"));
        assert_eq!(tops.len(), 1);
        assert_eq!(tops[0].side, Side::Fast);
        assert_eq!(tops[0].path, Vec::<usize>::new());
    }

    #[test]
    fn syntactic_examples() {
        let top = |text: &str| TopLoop {
            subprogram: p(text),
            side: Side::Small,
            path: vec![],
        };
        assert!(syntactic_test(&top("loop(x + y, x, 0)")));
        assert!(!syntactic_test(&top("loop(x + y, 2, 0)")));
        assert!(!syntactic_test(&top("loop(y, x, 0)")));
        assert!(syntactic_test(&top("loop2(x + y, x, x, 0, 1)")));
        assert!(syntactic_test(&top("loop2(x, x * y, x, 0, 1)")));
        assert!(!syntactic_test(&top("loop2(x, y, x, 0, 1)")));
        assert!(syntactic_test(&top("compr(x mod 2, x)")));
        assert!(!syntactic_test(&top("compr(x mod 2, 2)")));
    }

    #[test]
    fn window_examples() {
        assert!(is_acyclic_window(&window(|i| i)));
        assert!(!is_acyclic_window(&window(|_| 5)));
        assert!(!is_acyclic_window(&window(|i| i % 7)));
        assert!(is_acyclic_window(&window(|i| i % 16)));
        // only indices from 9 on matter
        assert!(!is_acyclic_window(&window(|i| if i < 9 { i } else { 3 })));
        // a period that breaks near the end is not a cycle
        assert!(is_acyclic_window(&window(|i| if i == 39 { 1 } else { 0 })));
    }

    #[test]
    fn acyclic_on_examples() {
        let cfg = EvalConfig::default();
        assert!(acyclic_on(&Program::VarX, VarId::X, false, &cfg));
        assert!(!acyclic_on(&p("x mod 2"), VarId::X, false, &cfg));
        assert!(!acyclic_on(&p("2 - x"), VarId::X, true, &cfg));
        assert!(acyclic_on(&p("2 - x"), VarId::X, false, &cfg));
        assert!(!acyclic_on(&Program::VarX, VarId::Y, false, &cfg));
        assert!(acyclic_on(&p("x + y"), VarId::Y, false, &cfg));
        // any execution error fails the test
        assert!(!acyclic_on(
            &p("x div (x - (2 + 2 + 1))"),
            VarId::X,
            false,
            &cfg
        ));
    }

    #[test]
    fn semantic_examples() {
        let cfg = EvalConfig::default();
        let top = |text: &str| TopLoop {
            subprogram: p(text),
            side: Side::Small,
            path: vec![],
        };
        assert!(semantic_test(&top("loop(x + y, x, 0)"), &cfg));
        assert!(!semantic_test(&top("loop(x + y, x mod (2 + 1), 0)"), &cfg));
        assert!(!semantic_test(&top("loop(x * x, x, 2)"), &cfg));
        assert!(semantic_test(&top("loop2(x + y, x, x, 0, 1)"), &cfg));
        assert!(semantic_test(&top("compr(x mod 2, x)"), &cfg));
    }

    #[test]
    fn classify_examples() {
        let cfg = EvalConfig::default();
        let c = classify_pair(&p("x * x"), &p("x * (x + 0)"), FilterMode::PerLoop, &cfg);
        assert_eq!(
            c,
            Classification {
                syn_pass: false,
                sem_pass: false
            }
        );
        let c = classify_pair(
            &p("loop(x + y, x, 0)"),
            &p("((x * x) + x) div 2"),
            FilterMode::PerLoop,
            &cfg,
        );
        assert_eq!(
            c,
            Classification {
                syn_pass: true,
                sem_pass: true
            }
        );
        let c = classify_pair(
            &p("loop(x + x, 2, x)"),
            &p("x * (2 + 2)"),
            FilterMode::PerLoop,
            &cfg,
        );
        assert_eq!(
            c,
            Classification {
                syn_pass: false,
                sem_pass: false
            }
        );
    }

    #[test]
    fn filter_modes_agree() {
        // an acyclic output forces a syntactic dependence, so a loop passing
        // the semantic test always passes the syntactic one as well
        let cfg = EvalConfig::default();
        let small = p("loop(x + y, x mod (2 + 1), 0)");
        let fast = p("loop(x + y, x, 1)");
        let per_loop = classify_pair(&small, &fast, FilterMode::PerLoop, &cfg);
        let per_test = classify_pair(&small, &fast, FilterMode::PerTest, &cfg);
        assert_eq!(
            per_loop,
            Classification {
                syn_pass: true,
                sem_pass: true
            }
        );
        assert_eq!(per_loop, per_test);
        let only_syn = classify_pair(&small, &p("x"), FilterMode::PerTest, &cfg);
        assert_eq!(
            only_syn,
            Classification {
                syn_pass: true,
                sem_pass: false
            }
        );
        assert_eq!("per-test".parse::<FilterMode>(), Ok(FilterMode::PerTest));
        assert!("both".parse::<FilterMode>().is_err());
    }
}
