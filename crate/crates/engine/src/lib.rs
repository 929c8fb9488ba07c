//! Search engines for ground normal programs and their generator/tester
//! combinations: a CDCL-based stable-model engine (Clark completion plus
//! lazily learnt loop clauses) and a counterexample-guided search for
//! stable-unstable models with projection-level learning.

mod graph;
pub mod instance;
pub mod sat;
pub mod su;

pub use instance::{EngineConfig, EngineStats, SolverInstance};
pub use su::{SuSearch, SuStats};
