//! Ground program data model: rules, normal programs with explicit
//! vocabularies and parameters, interpretations, and recursively combined
//! programs.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::symbols::{AtomId, SymbolTable};

/// Ordered set of atoms; the canonical set representation throughout.
pub type AtomSet = BTreeSet<AtomId>;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("atom `{0}` occurs in a rule but not in the declared vocabulary")]
    AtomOutsideVocabulary(String),
    #[error("parameter set contains `{0}`, which is not in the vocabulary")]
    ParameterOutsideVocabulary(String),
    #[error("parameter `{0}` occurs in a rule head")]
    ParameterInHead(String),
    #[error("programs of a combined program must share one symbol table")]
    SymbolTableMismatch,
    #[error("shared atom `{0}` occurs in the head of an inner-program rule")]
    SharedAtomInInnerHead(String),
}

/// A ground rule `head <- pos_body, not neg_body`.
///
/// `head == None` encodes a constraint. The positive and negative bodies may
/// overlap; such a rule is inert (its body is never satisfied by a stable
/// model) but legal, since grounding can produce it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Rule {
    head: Option<AtomId>,
    pos_body: AtomSet,
    neg_body: AtomSet,
}

impl Rule {
    pub fn new(
        head: Option<AtomId>,
        pos_body: impl IntoIterator<Item = AtomId>,
        neg_body: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        Self {
            head,
            pos_body: pos_body.into_iter().collect(),
            neg_body: neg_body.into_iter().collect(),
        }
    }

    pub fn fact(head: AtomId) -> Self {
        Self::new(Some(head), [], [])
    }

    pub fn constraint(
        pos_body: impl IntoIterator<Item = AtomId>,
        neg_body: impl IntoIterator<Item = AtomId>,
    ) -> Self {
        Self::new(None, pos_body, neg_body)
    }

    pub fn head(&self) -> Option<AtomId> {
        self.head
    }

    pub fn pos_body(&self) -> &AtomSet {
        &self.pos_body
    }

    pub fn neg_body(&self) -> &AtomSet {
        &self.neg_body
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.pos_body.is_empty() && self.neg_body.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_positive(&self) -> bool {
        self.neg_body.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.head
            .into_iter()
            .chain(self.pos_body.iter().copied())
            .chain(self.neg_body.iter().copied())
    }
}

/// A ground normal program over an explicit vocabulary, with a distinguished
/// parameter set whose atoms are free inputs rather than defined atoms.
///
/// The vocabulary may strictly exceed the atoms occurring in rules; undeclared
/// occurrence is an error. Parameters never occur in rule heads. Constraints
/// (rules without a head) are accepted; the semantics treats their body as
/// forbidden.
#[derive(Clone, Debug)]
pub struct NormalProgram {
    symbols: SymbolTable,
    rules: Vec<Rule>,
    vocabulary: AtomSet,
    parameters: AtomSet,
}

impl PartialEq for NormalProgram {
    fn eq(&self, other: &Self) -> bool {
        self.symbols.same_table(&other.symbols)
            && self.rules == other.rules
            && self.vocabulary == other.vocabulary
            && self.parameters == other.parameters
    }
}

impl Eq for NormalProgram {}

impl NormalProgram {
    pub fn new(
        symbols: SymbolTable,
        rules: Vec<Rule>,
        vocabulary: AtomSet,
        parameters: AtomSet,
    ) -> Result<Self, ProgramError> {
        for rule in &rules {
            for atom in rule.atoms() {
                if !vocabulary.contains(&atom) {
                    return Err(ProgramError::AtomOutsideVocabulary(
                        symbols.name(atom).to_string(),
                    ));
                }
            }
        }
        for &param in &parameters {
            if !vocabulary.contains(&param) {
                return Err(ProgramError::ParameterOutsideVocabulary(
                    symbols.name(param).to_string(),
                ));
            }
        }
        for rule in &rules {
            if let Some(head) = rule.head() {
                if parameters.contains(&head) {
                    return Err(ProgramError::ParameterInHead(
                        symbols.name(head).to_string(),
                    ));
                }
            }
        }
        Ok(Self {
            symbols,
            rules,
            vocabulary,
            parameters,
        })
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.symbols
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn vocabulary(&self) -> &AtomSet {
        &self.vocabulary
    }

    pub fn parameters(&self) -> &AtomSet {
        &self.parameters
    }

    /// Vocabulary restricted to user atoms; this is the set that takes part
    /// in sharing between the levels of a combined program.
    pub fn user_vocabulary(&self) -> AtomSet {
        self.vocabulary
            .iter()
            .copied()
            .filter(|&a| !self.symbols.is_internal(a))
            .collect()
    }

    pub fn is_positive(&self) -> bool {
        self.rules.iter().all(Rule::is_positive)
    }

    /// Atoms derived by an unconditional fact rule.
    pub fn fact_atoms(&self) -> AtomSet {
        self.rules
            .iter()
            .filter(|r| r.is_fact())
            .filter_map(Rule::head)
            .collect()
    }

    /// Same program with a replaced parameter set. Fails if a new parameter
    /// occurs in a rule head or outside the vocabulary.
    pub fn with_parameters(&self, parameters: AtomSet) -> Result<Self, ProgramError> {
        Self::new(
            self.symbols.clone(),
            self.rules.clone(),
            self.vocabulary.clone(),
            parameters,
        )
    }

    /// The program extended with the given atoms as facts, parameters
    /// cleared. This realizes the union of a program with a chosen parameter
    /// interpretation that parameterized stability quantifies over.
    pub fn with_facts(&self, facts: &Interpretation) -> Self {
        let mut rules = self.rules.clone();
        rules.extend(facts.iter().map(Rule::fact));
        Self {
            symbols: self.symbols.clone(),
            rules,
            vocabulary: self.vocabulary.clone(),
            parameters: AtomSet::new(),
        }
    }

    pub fn display(&self) -> ProgramDisplay<'_> {
        ProgramDisplay(self)
    }
}

pub struct ProgramDisplay<'a>(&'a NormalProgram);

impl fmt::Display for ProgramDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tab = self.0.symbols();
        for rule in self.0.rules() {
            if let Some(h) = rule.head() {
                write!(f, "{}", tab.name(h))?;
            }
            if !rule.pos_body().is_empty() || !rule.neg_body().is_empty() {
                write!(f, " :- ")?;
                let mut first = true;
                for &a in rule.pos_body() {
                    if !first {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", tab.name(a))?;
                    first = false;
                }
                for &a in rule.neg_body() {
                    if !first {
                        write!(f, ", ")?;
                    }
                    write!(f, "not {}", tab.name(a))?;
                    first = false;
                }
            }
            writeln!(f, ".")?;
        }
        Ok(())
    }
}

/// A finite set of true atoms over some program's vocabulary.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Debug)]
pub struct Interpretation(AtomSet);

impl Interpretation {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, atom: AtomId) -> bool {
        self.0.contains(&atom)
    }

    pub fn insert(&mut self, atom: AtomId) -> bool {
        self.0.insert(atom)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_set(&self) -> &AtomSet {
        &self.0
    }

    pub fn is_subset(&self, atoms: &AtomSet) -> bool {
        self.0.is_subset(atoms)
    }

    /// Projection onto `atoms`.
    pub fn restrict(&self, atoms: &AtomSet) -> Interpretation {
        Interpretation(self.0.intersection(atoms).copied().collect())
    }

    /// Names of the contained atoms, sorted lexicographically. Internal atoms
    /// are skipped unless `show_internal` is set.
    pub fn sorted_names(&self, tab: &SymbolTable, show_internal: bool) -> Vec<Arc<str>> {
        let mut names: Vec<Arc<str>> = self
            .iter()
            .filter(|&a| show_internal || !tab.is_internal(a))
            .map(|a| tab.name(a))
            .collect();
        names.sort_unstable();
        names
    }
}

impl FromIterator<AtomId> for Interpretation {
    fn from_iter<T: IntoIterator<Item = AtomId>>(iter: T) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

impl From<AtomSet> for Interpretation {
    fn from(set: AtomSet) -> Self {
        Interpretation(set)
    }
}

/// A normal program stacked on top of an optional inner combined program.
///
/// The inner level's outer program is parameterized by exactly the shareable
/// vocabulary of the boundary; [`KCombinedProgram::nest`] computes and
/// installs that set. Depth 1 (no inner program) is plain stable-model
/// solving.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KCombinedProgram {
    outer: NormalProgram,
    inner: Option<Box<KCombinedProgram>>,
}

impl KCombinedProgram {
    pub fn single(outer: NormalProgram) -> Self {
        Self { outer, inner: None }
    }

    /// Stacks `outer` on `inner`, rewiring the boundary: the shared
    /// vocabulary is the intersection of the two adjacent user vocabularies,
    /// minus atoms that are facts on both sides (their truth is forced
    /// everywhere, so coincidence is automatic), and becomes the parameter
    /// set of the inner level's outer program.
    pub fn nest(outer: NormalProgram, inner: KCombinedProgram) -> Result<Self, ProgramError> {
        if !outer.symbols().same_table(inner.outer.symbols()) {
            return Err(ProgramError::SymbolTableMismatch);
        }
        let shared = boundary_vocabulary(&outer, &inner.outer);
        let symbols = outer.symbols().clone();
        for rule in inner.outer.rules() {
            if let Some(head) = rule.head() {
                if shared.contains(&head) {
                    return Err(ProgramError::SharedAtomInInnerHead(
                        symbols.name(head).to_string(),
                    ));
                }
            }
        }
        let inner_outer = inner.outer.with_parameters(shared)?;
        Ok(Self {
            outer,
            inner: Some(Box::new(KCombinedProgram {
                outer: inner_outer,
                inner: inner.inner,
            })),
        })
    }

    pub fn outer(&self) -> &NormalProgram {
        &self.outer
    }

    pub fn inner(&self) -> Option<&KCombinedProgram> {
        self.inner.as_deref()
    }

    pub fn depth(&self) -> usize {
        1 + self.inner.as_ref().map_or(0, |c| c.depth())
    }

    /// Shared vocabulary at the outermost boundary; empty for depth 1.
    pub fn shared(&self) -> AtomSet {
        self.inner
            .as_ref()
            .map(|c| c.outer.parameters().clone())
            .unwrap_or_default()
    }

    /// A combined program whose levels share no vocabulary only constrains
    /// the inner program to have no model at all.
    pub fn is_independent(&self) -> bool {
        self.inner.is_some() && self.shared().is_empty()
    }

    pub fn symbols(&self) -> &SymbolTable {
        self.outer.symbols()
    }

    /// Total vocabulary size summed over all levels; the brute-force solvers
    /// cap on this.
    pub fn total_vocabulary_atoms(&self) -> usize {
        self.outer.vocabulary().len() + self.inner.as_ref().map_or(0, |c| c.total_vocabulary_atoms())
    }
}

/// Shareable vocabulary between two adjacent program levels: user atoms in
/// both vocabularies, except atoms that both levels derive as unconditional
/// facts (typically a shared instance file).
pub fn boundary_vocabulary(outer: &NormalProgram, inner: &NormalProgram) -> AtomSet {
    let outer_user = outer.user_vocabulary();
    let inner_user = inner.user_vocabulary();
    let outer_facts = outer.fact_atoms();
    let inner_facts = inner.fact_atoms();
    outer_user
        .intersection(&inner_user)
        .copied()
        .filter(|a| !(outer_facts.contains(a) && inner_facts.contains(a)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{atoms, ProgramSketch};

    #[test]
    fn vocabulary_violations_are_rejected() {
        let tab = SymbolTable::new();
        let a = tab.intern("a");
        let b = tab.intern("b");
        let err = NormalProgram::new(
            tab,
            vec![Rule::new(Some(a), [b], [])],
            AtomSet::from([a]),
            AtomSet::new(),
        )
        .unwrap_err();
        assert_eq!(err, ProgramError::AtomOutsideVocabulary("b".into()));
    }

    #[test]
    fn parameters_must_not_occur_in_heads() {
        let tab = SymbolTable::new();
        let a = tab.intern("a");
        let b = tab.intern("b");
        let err = NormalProgram::new(
            tab,
            vec![Rule::new(Some(a), [b], [])],
            AtomSet::from([a, b]),
            AtomSet::from([a]),
        )
        .unwrap_err();
        assert_eq!(err, ProgramError::ParameterInHead("a".into()));
    }

    #[test]
    fn overlapping_pos_neg_body_is_allowed() {
        let tab = SymbolTable::new();
        let a = tab.intern("a");
        let c = tab.intern("c");
        let p = NormalProgram::new(
            tab,
            vec![Rule::new(Some(a), [c], [c])],
            AtomSet::from([a, c]),
            AtomSet::new(),
        );
        assert!(p.is_ok());
    }

    #[test]
    fn nesting_computes_the_boundary() {
        let sketch = ProgramSketch::new();
        let outer = sketch.program(
            &["a", "b", "d", "__c_a"],
            &["d"],
            &[
                (Some("b"), &["a"], &[]),
                (Some("a"), &[], &["__c_a"]),
                (Some("__c_a"), &[], &["a"]),
            ],
        );
        let inner = sketch.program(
            &["c", "b", "d", "__c_c"],
            &[],
            &[
                (Some("c"), &[], &["__c_c"]),
                (Some("__c_c"), &[], &["c"]),
                (None, &["c", "d"], &[]),
            ],
        );
        let combined =
            KCombinedProgram::nest(outer, KCombinedProgram::single(inner)).expect("valid nest");
        assert_eq!(combined.depth(), 2);
        assert_eq!(combined.shared(), atoms(&sketch.table, &["b", "d"]));
        assert!(!combined.is_independent());
    }

    #[test]
    fn shared_atom_in_inner_head_is_an_error() {
        let sketch = ProgramSketch::new();
        let outer = sketch.program(&["a", "b"], &[], &[(Some("b"), &["a"], &[])]);
        // b is a fact only on the inner side, so it stays shared and the
        // head occurrence is a violation.
        let inner = sketch.program(&["b"], &[], &[(Some("b"), &[], &[])]);
        let err = KCombinedProgram::nest(outer, KCombinedProgram::single(inner)).unwrap_err();
        assert_eq!(err, ProgramError::SharedAtomInInnerHead("b".into()));
    }

    #[test]
    fn facts_on_both_sides_drop_out_of_the_boundary() {
        let sketch = ProgramSketch::new();
        let outer = sketch.program(
            &["f", "a", "__c_a"],
            &[],
            &[
                (Some("f"), &[], &[]),
                (Some("a"), &["f"], &["__c_a"]),
                (Some("__c_a"), &[], &["a"]),
            ],
        );
        let inner = sketch.program(
            &["f", "a", "t"],
            &[],
            &[(Some("f"), &[], &[]), (Some("t"), &["f", "a"], &[])],
        );
        let combined =
            KCombinedProgram::nest(outer, KCombinedProgram::single(inner)).expect("valid");
        assert_eq!(combined.shared(), atoms(&sketch.table, &["a"]));
    }

    #[test]
    fn independent_pair_is_flagged() {
        let sketch = ProgramSketch::new();
        let outer = sketch.program(&["a"], &[], &[(Some("a"), &[], &[])]);
        let inner = sketch.program(&["z"], &[], &[(Some("z"), &[], &["z"])]);
        let combined =
            KCombinedProgram::nest(outer, KCombinedProgram::single(inner)).expect("valid");
        assert!(combined.is_independent());
    }

    #[test]
    fn distinct_tables_cannot_be_nested() {
        let sketch_a = ProgramSketch::new();
        let sketch_b = ProgramSketch::new();
        let outer = sketch_a.program(&["a"], &[], &[]);
        let inner = sketch_b.program(&["a"], &[], &[]);
        let err = KCombinedProgram::nest(outer, KCombinedProgram::single(inner)).unwrap_err();
        assert_eq!(err, ProgramError::SymbolTableMismatch);
    }
}
