//! Hand-building helpers and shared fixtures for the test suites of the
//! workspace crates. Not intended for production use.

use crate::program::{AtomSet, Interpretation, KCombinedProgram, NormalProgram, Rule};
use crate::symbols::SymbolTable;

/// Builds small ground programs from string atoms, interning on the fly.
#[derive(Default)]
pub struct ProgramSketch {
    pub table: SymbolTable,
}

/// `(head, positive body, negative body)`; `None` head is a constraint.
pub type RuleSketch<'a> = (Option<&'a str>, &'a [&'a str], &'a [&'a str]);

impl ProgramSketch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn program(&self, vocab: &[&str], params: &[&str], rules: &[RuleSketch]) -> NormalProgram {
        let vocabulary: AtomSet = vocab.iter().map(|n| self.table.intern(n)).collect();
        let parameters: AtomSet = params.iter().map(|n| self.table.intern(n)).collect();
        let rules = rules
            .iter()
            .map(|(head, pos, neg)| {
                Rule::new(
                    head.map(|h| self.table.intern(h)),
                    pos.iter().map(|n| self.table.intern(n)),
                    neg.iter().map(|n| self.table.intern(n)),
                )
            })
            .collect();
        NormalProgram::new(self.table.clone(), rules, vocabulary, parameters)
            .expect("sketch program must be well-formed")
    }

    pub fn interpretation(&self, names: &[&str]) -> Interpretation {
        names.iter().map(|n| self.table.intern(n)).collect()
    }
}

/// Looks up already-interned atoms by name; panics on unknown names.
pub fn atoms(table: &SymbolTable, names: &[&str]) -> AtomSet {
    names
        .iter()
        .map(|n| {
            table
                .lookup(n)
                .unwrap_or_else(|| panic!("atom `{n}` was never interned"))
        })
        .collect()
}

/// The standard three-program fixture used across the workspace tests.
///
/// All three programs are already in normal form (choices unfolded into even
/// negative loops over `__c_*` complement atoms, constraints into `__f*` fail
/// rules) and share one symbol table:
///
/// * `tester`: choice over `c` with constraints forbidding `c ∧ d` and
///   `¬c ∧ b`; vocabulary `{c,b,d}` plus internals, parameters `{b,d}`.
///   Stable models project to `{}`, `{c}`, `{d}`, `{b,c}`.
/// * `generator`: choice over `a` and the rule `b ← a`; vocabulary `{a,b,d}`
///   plus internals, parameters `{d}`. Stable models project to `{}`, `{d}`,
///   `{a,b}`, `{d,a,b}`.
/// * `third`: `{e ← e. d ← e.}` over `{d,e}`; its only stable model is empty.
///
/// The pair `(generator, tester)` has exactly one stable-unstable model,
/// `{d,a,b}`, and stacking `third` on top of that pair yields exactly the
/// empty stable-unstable model.
pub struct TinyTriple {
    pub sketch: ProgramSketch,
    pub tester: NormalProgram,
    pub generator: NormalProgram,
    pub third: NormalProgram,
}

pub fn tiny_triple() -> TinyTriple {
    let sketch = ProgramSketch::new();
    let tester = sketch.program(
        &["c", "b", "d", "__c_c", "__f0", "__f1"],
        &["b", "d"],
        &[
            (Some("c"), &[], &["__c_c"]),
            (Some("__c_c"), &[], &["c"]),
            (Some("__f0"), &["c", "d"], &["__f0"]),
            (Some("__f1"), &["b"], &["c", "__f1"]),
        ],
    );
    let generator = sketch.program(
        &["a", "b", "d", "__c_a"],
        &["d"],
        &[
            (Some("a"), &[], &["__c_a"]),
            (Some("__c_a"), &[], &["a"]),
            (Some("b"), &["a"], &[]),
        ],
    );
    let third = sketch.program(
        &["d", "e"],
        &[],
        &[(Some("e"), &["e"], &[]), (Some("d"), &["e"], &[])],
    );
    TinyTriple {
        sketch,
        tester,
        generator,
        third,
    }
}

impl TinyTriple {
    /// `(generator, tester)` as a depth-2 combined program.
    pub fn pair(&self) -> KCombinedProgram {
        KCombinedProgram::nest(
            self.generator.clone(),
            KCombinedProgram::single(self.tester.clone()),
        )
        .expect("fixture pair is well-formed")
    }

    /// `(third, (generator, tester))` as a depth-3 combined program.
    pub fn triple(&self) -> KCombinedProgram {
        KCombinedProgram::nest(self.third.clone(), self.pair())
            .expect("fixture triple is well-formed")
    }

    pub fn interpretation(&self, names: &[&str]) -> Interpretation {
        self.sketch.interpretation(names)
    }
}
