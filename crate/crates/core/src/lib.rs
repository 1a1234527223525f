//! Loop-program language over big integers, and the tooling to turn pairs
//! of equivalent programs for OEIS sequences into inductive theorem proving
//! problems.
//!
//! - [`program`], [`syntax`]: AST, measures, concrete syntax.
//! - [`interp`]: evaluator with the abstract-time cost model.
//! - [`oeis`]: sequence and solution ingestion, coverage, problem assembly.
//! - [`verify`]: equality testing on the first 100 inputs.
//! - [`induction`]: syntactic and semantic filters for induction-likely problems.
//! - [`smt`]: SMT-LIB lowering, emission and checking.
//! - [`harness`]: external solver runs and result tables.
//! - [`pipeline`]: the stages chained, with survivor counts.

pub mod harness;
pub mod induction;
pub mod interp;
pub mod oeis;
pub mod pipeline;
pub mod program;
pub mod smt;
pub mod syntax;
pub mod verify;

pub use interp::{
    eval, generate_seq, speed, Budget, EvalConfig, EvalError, EvalOutcome, Evaluated,
};
pub use program::{total_order, Program, VarId};
pub use syntax::{parse, print, CondStyle, ParseError};
