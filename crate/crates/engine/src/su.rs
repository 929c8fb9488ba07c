//! Counterexample-guided search for stable-unstable models of combined
//! programs: draw stable-model candidates from the outer engine, ask the
//! inner level for a model coinciding on the shared vocabulary, and learn a
//! blocking clause over the shared projection on every refutation.
//!
//! Refuting the projection instead of the full candidate is sound because
//! the inner level reads the candidate only through its shared atoms: once
//! some inner model agrees with a projection, no outer model with that
//! projection can be stable-unstable.

use std::collections::BTreeSet;

use sulp_core::{is_stable_unstable, AtomId, AtomSet, Interpretation, KCombinedProgram};

use crate::instance::{EngineConfig, SolverInstance};

#[derive(Clone, Copy, Default, Debug)]
pub struct SuStats {
    pub candidates: u64,
    pub refutations: u64,
    pub inner_calls: u64,
}

enum InnerLevel {
    /// Depth-2 boundary: the inner level is a plain program, so the oracle
    /// call is a direct stable-model query under the shared assignment.
    Tester(SolverInstance),
    /// Deeper boundary: the oracle call recurses into another search.
    Search(Box<SuSearch>),
}

/// One search per combined program. Inner engines stay warm across oracle
/// calls: the shared assignment changes, the programs and their learnt
/// clauses do not.
pub struct SuSearch {
    program: KCombinedProgram,
    outer: SolverInstance,
    inner: Option<InnerLevel>,
    shared: AtomSet,
    refuted: BTreeSet<Interpretation>,
    stats: SuStats,
}

impl SuSearch {
    pub fn new(program: &KCombinedProgram) -> Self {
        Self::with_config(program, EngineConfig::default())
    }

    pub fn with_config(program: &KCombinedProgram, config: EngineConfig) -> Self {
        let outer = SolverInstance::build_with_config(program.outer(), config);
        let shared = program.shared();
        let inner = program.inner().map(|inner| {
            if inner.depth() == 1 {
                InnerLevel::Tester(SolverInstance::build_with_config(inner.outer(), config))
            } else {
                InnerLevel::Search(Box::new(SuSearch::with_config(inner, config)))
            }
        });
        SuSearch {
            program: program.clone(),
            outer,
            inner,
            shared,
            refuted: BTreeSet::new(),
            stats: SuStats::default(),
        }
    }

    pub fn program(&self) -> &KCombinedProgram {
        &self.program
    }

    pub fn stats(&self) -> SuStats {
        self.stats
    }

    /// Shared-vocabulary assignments already proven extendable by the inner
    /// level, hence never part of a stable-unstable model.
    pub fn refuted_projections(&self) -> &BTreeSet<Interpretation> {
        &self.refuted
    }

    /// Statistics of the outer stable-model engine at this level.
    pub fn outer_stats(&self) -> crate::instance::EngineStats {
        self.outer.stats()
    }

    /// Finds a stable-unstable model, or `None` when none exists.
    pub fn solve(&mut self) -> Option<Interpretation> {
        self.solve_under(&[])
    }

    /// As `solve`, additionally requiring agreement with a partial
    /// assignment over the outer vocabulary. Used for the recursive oracle
    /// calls of enclosing levels.
    fn solve_under(&mut self, assumptions: &[(AtomId, bool)]) -> Option<Interpretation> {
        loop {
            let candidate = self.outer.next_model(assumptions)?;
            self.stats.candidates += 1;
            let Some(inner) = &mut self.inner else {
                return Some(candidate);
            };
            let projection = candidate.restrict(&self.shared);
            self.stats.inner_calls += 1;
            let inner_has_match = match inner {
                InnerLevel::Tester(engine) => engine.has_model_under(&self.shared, &projection),
                InnerLevel::Search(sub) => {
                    let sub_assumptions: Vec<(AtomId, bool)> = self
                        .shared
                        .iter()
                        .map(|&a| (a, projection.contains(a)))
                        .collect();
                    sub.solve_under(&sub_assumptions).is_some()
                }
            };
            if inner_has_match {
                self.outer.block_assignment(&self.shared, &projection);
                self.refuted.insert(projection);
                self.stats.refutations += 1;
                continue;
            }
            return Some(candidate);
        }
    }

    /// Emits pairwise-distinct stable-unstable models over the full outer
    /// vocabulary, blocking each after emission.
    pub fn enumerate_su(&mut self, limit: Option<usize>) -> impl Iterator<Item = Interpretation> + '_ {
        let mut remaining = limit;
        std::iter::from_fn(move || {
            if remaining == Some(0) {
                return None;
            }
            let model = self.solve_under(&[])?;
            self.outer.block_model(&model);
            if let Some(r) = remaining.as_mut() {
                *r -= 1;
            }
            Some(model)
        })
    }

    /// Decision variant for a given interpretation, using this search as the
    /// inner oracle. Interpretations that are not stable models of the outer
    /// program are rejected without an inner call.
    pub fn check(&mut self, i: &Interpretation) -> bool {
        let program = self.program.clone();
        let inner = &mut self.inner;
        let shared = &self.shared;
        let stats = &mut self.stats;
        is_stable_unstable(
            &program,
            i,
            |_, target| -> Result<bool, std::convert::Infallible> {
                stats.inner_calls += 1;
                Ok(match inner.as_mut().expect("depth > 1 when oracle is called") {
                    InnerLevel::Tester(engine) => engine.has_model_under(shared, target),
                    InnerLevel::Search(sub) => {
                        let sub_assumptions: Vec<(AtomId, bool)> =
                            shared.iter().map(|&a| (a, target.contains(a))).collect();
                        sub.solve_under(&sub_assumptions).is_some()
                    }
                })
            },
        )
        .unwrap()
    }
}
