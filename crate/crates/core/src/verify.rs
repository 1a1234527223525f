//! Extended equality testing of the two programs of a problem.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::interp::{CarryOver, EvalConfig, EvalError};
use crate::oeis::{self, DataError, ProblemRecord, Status};

/// Number of inputs `0..N` on which both programs are compared.
pub const VERIFY_INPUTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Small,
    Fast,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    Error {
        index: usize,
        side: Side,
        error: EvalError,
    },
    Mismatch {
        index: usize,
        #[serde(with = "decimal")]
        small: BigInt,
        #[serde(with = "decimal")]
        fast: BigInt,
    },
}

mod decimal {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    pub status: Status,
    /// Indices at which both programs produced a value.
    pub checked_upto: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

/// Compares both programs on `x = 0..100`, each side drawing on its own
/// carried-over budget. Problems with at least 100 known terms were already
/// compared on those inputs by the cover check and are accepted directly.
pub fn verify100(problem: &ProblemRecord, cfg: &EvalConfig) -> VerifyReport {
    let report = |status, checked_upto, failure| VerifyReport {
        id: problem.id.clone(),
        status,
        checked_upto,
        failure,
    };
    if problem.terms.len() >= VERIFY_INPUTS {
        return report(Status::Verified, VERIFY_INPUTS, None);
    }
    let mut small = CarryOver::new(cfg);
    let mut fast = CarryOver::new(cfg);
    let zero = BigInt::zero();
    for index in 0..VERIFY_INPUTS {
        let x = BigInt::from(index);
        let lhs = match small.call(&problem.small, &x, &zero) {
            Ok(e) => e.value,
            Err(error) => {
                return report(
                    Status::NonVerified,
                    index,
                    Some(Failure::Error {
                        index,
                        side: Side::Small,
                        error,
                    }),
                )
            }
        };
        let rhs = match fast.call(&problem.fast, &x, &zero) {
            Ok(e) => e.value,
            Err(error) => {
                return report(
                    Status::NonVerified,
                    index,
                    Some(Failure::Error {
                        index,
                        side: Side::Fast,
                        error,
                    }),
                )
            }
        };
        if lhs != rhs {
            return report(
                Status::Refuted,
                index + 1,
                Some(Failure::Mismatch {
                    index,
                    small: lhs,
                    fast: rhs,
                }),
            );
        }
    }
    report(Status::Verified, VERIFY_INPUTS, None)
}

/// Verifies every problem in parallel, preserving input order.
pub fn verify_all(problems: &[ProblemRecord], cfg: &EvalConfig) -> Vec<VerifyReport> {
    use rayon::prelude::*;
    problems.par_iter().map(|p| verify100(p, cfg)).collect()
}

/// Writes one JSON report per line.
pub fn write_reports(path: &Path, reports: &[VerifyReport]) -> Result<(), DataError> {
    let text: String = reports
        .iter()
        .map(|r| serde_json::to_string(r).expect("reports serialize") + "\n")
        .collect();
    std::fs::write(path, text).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the ids of non-verified problems, sorted, one per line.
pub fn emit_nonverified(path: &Path, reports: &[VerifyReport]) -> Result<(), DataError> {
    let ids: Vec<&str> = reports
        .iter()
        .filter(|r| r.status == Status::NonVerified)
        .map(|r| r.id.as_str())
        .collect();
    oeis::write_ids(path, &ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oeis::Anum;
    use crate::syntax::parse;

    fn problem(small: &str, fast: &str, nterms: usize) -> ProblemRecord {
        ProblemRecord::new(
            vec![Anum(1)],
            vec![BigInt::zero(); nterms],
            parse(small).unwrap(),
            parse(fast).unwrap(),
        )
    }

    #[test]
    fn triangular_pair_verifies() {
        let r = verify100(
            &problem("loop(x + y, x, 0)", "((x * x) + x) div 2", 20),
            &EvalConfig::verification(),
        );
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.checked_upto, 100);
        assert_eq!(r.failure, None);
    }

    #[test]
    fn refuted_at_first_input() {
        let r = verify100(&problem("x", "1", 20), &EvalConfig::verification());
        assert_eq!(r.status, Status::Refuted);
        assert_eq!(
            r.failure,
            Some(Failure::Mismatch {
                index: 0,
                small: BigInt::zero(),
                fast: BigInt::from(1)
            })
        );
    }

    #[test]
    fn error_before_mismatch_is_nonverified() {
        // equal until x = 2 where the fast side divides by zero
        let r = verify100(
            &problem("x", "(x * (2 - x)) div (2 - x)", 2),
            &EvalConfig::verification(),
        );
        assert_eq!(r.status, Status::NonVerified);
        assert_eq!(r.checked_upto, 2);
        assert_eq!(
            r.failure,
            Some(Failure::Error {
                index: 2,
                side: Side::Fast,
                error: EvalError::DivByZero
            })
        );
    }

    #[test]
    fn small_side_errors_first() {
        let r = verify100(
            &problem("1 div (1 - x)", "x div (1 - 1)", 2),
            &EvalConfig::verification(),
        );
        assert_eq!(r.status, Status::NonVerified);
        assert!(matches!(
            r.failure,
            Some(Failure::Error {
                index: 0,
                side: Side::Fast,
                ..
            })
        ));
        let r = verify100(
            &problem("1 div (1 - x)", "1 - x", 2),
            &EvalConfig::verification(),
        );
        assert!(matches!(
            r.failure,
            Some(Failure::Error {
                index: 1,
                side: Side::Small,
                ..
            })
        ));
    }

    #[test]
    fn long_sequences_skip_the_check() {
        let r = verify100(&problem("x", "1", 100), &EvalConfig::verification());
        assert_eq!(r.status, Status::Verified);
    }

    #[test]
    fn nonverified_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("all_nonverified100");
        emit_nonverified(&path, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
        let mk = |id: &str, status| VerifyReport {
            id: id.into(),
            status,
            checked_upto: 0,
            failure: None,
        };
        let reports = vec![
            mk("A9", Status::NonVerified),
            mk("A1", Status::Verified),
            mk("A3", Status::Refuted),
            mk("A2", Status::NonVerified),
        ];
        emit_nonverified(&path, &reports).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "A2\nA9\n");
    }

    #[test]
    fn report_json() {
        let r = VerifyReport {
            id: "A1".into(),
            status: Status::Refuted,
            checked_upto: 1,
            failure: Some(Failure::Mismatch {
                index: 0,
                small: BigInt::from(-3),
                fast: BigInt::from(4),
            }),
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"id":"A1","status":"refuted","checked_upto":1,"failure":{"kind":"mismatch","index":0,"small":"-3","fast":"4"}}"#
        );
        assert_eq!(serde_json::from_str::<VerifyReport>(&s).unwrap(), r);
    }
}
