//! Ground-program data model and definition-level semantics for normal logic
//! programs combined into generator/tester stacks, plus exhaustive reference
//! solvers for programs, prefixed Boolean formulas, parity games, and
//! labeled-graph reachability problems.
//!
//! Everything here is immutable after construction and usable from multiple
//! threads; the performance-oriented search lives in the engine crate.

pub mod brute;
pub mod instances;
pub mod program;
pub mod semantics;
pub mod symbols;
pub mod test_support;

pub use brute::{enum_stable_bf, enum_su_bf, eval_qbf_bf, is_ponr_bf, solve_parity_bf};
pub use brute::{BruteForceConfig, CapExceeded, ParityOutcome};
pub use instances::{
    ArcLabel, InstanceError, LabeledGraph, Matrix, ParityGame, Player, QbfInstance, QbfLit,
    Quantifier, QuantifierBlock,
};
pub use program::{
    boundary_vocabulary, AtomSet, Interpretation, KCombinedProgram, NormalProgram, ProgramError,
    Rule,
};
pub use semantics::{is_model, is_stable, is_stable_unstable, least_model, reduct, SemanticsError};
pub use symbols::{AtomId, SymbolTable, INTERNAL_PREFIX};
