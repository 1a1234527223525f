#![allow(dead_code)]

use std::path::PathBuf;

use oeisbench::oeis::{build_problems, load_solutions, load_stripped, ProblemRecord};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn load(stripped: &str, solutions: &str) -> Vec<ProblemRecord> {
    let seqs = load_stripped(&fixture(stripped)).expect("fixture stripped file");
    let sols = load_solutions(&fixture(solutions)).expect("fixture solutions");
    build_problems(&sols.records, &seqs).expect("fixture problems")
}

/// The six bundled problems, sorted by id.
pub fn problems() -> Vec<ProblemRecord> {
    load("stripped", "solutions.tsv")
}

pub fn corrupted() -> ProblemRecord {
    load("corrupted_stripped", "corrupted_solutions.tsv").remove(0)
}

pub fn problem(id: &str) -> ProblemRecord {
    problems()
        .into_iter()
        .find(|p| p.id == id)
        .unwrap_or_else(|| panic!("no fixture problem {id}"))
}
