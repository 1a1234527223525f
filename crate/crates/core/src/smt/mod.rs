//! Lowering of program pairs to SMT-LIB scripts.

pub mod check;
pub mod emit;
pub mod lower;
pub mod sexpr;
pub mod term;

pub use check::{check_script, CheckError, CheckedScript, EvalFailure, ScriptEvaluator};
pub use emit::{
    build_script, emit, export_all, negated_conjecture, read_manifest, ConjectureVariant,
    ExportError, ExportOptions, ManifestEntry, SmtScript,
};
pub use lower::{lower, LowerError, LoweredDef, LoweredProblem};
pub use term::Term;
