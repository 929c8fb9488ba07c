//! Definition-level semantic checks for ground normal programs: reduct,
//! least models of positive programs, modelhood, (parameterized) stability,
//! and stable-unstable membership for combined programs.

use std::collections::VecDeque;

use crate::program::{AtomSet, Interpretation, KCombinedProgram, NormalProgram, Rule};
use crate::symbols::AtomId;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("rule {0} has a negative body literal; least models are defined for positive programs")]
    NotPositive(usize),
    #[error("rule {0} is a constraint; least models are defined for definite programs")]
    Headless(usize),
    #[error("fact atom `{0}` is not declared as a parameter")]
    FactOutsideParameters(String),
}

/// The reduct of `p` with respect to `i`: rules whose negative body avoids
/// `i`, with the negative body deleted. Vocabulary and parameters carry over.
pub fn reduct(p: &NormalProgram, i: &Interpretation) -> NormalProgram {
    debug_assert!(i.is_subset(p.vocabulary()));
    let rules = p
        .rules()
        .iter()
        .filter(|r| r.neg_body().iter().all(|b| !i.contains(*b)))
        .map(|r| Rule::new(r.head(), r.pos_body().iter().copied(), []))
        .collect();
    NormalProgram::new(
        p.symbols().clone(),
        rules,
        p.vocabulary().clone(),
        p.parameters().clone(),
    )
    .expect("reduct preserves well-formedness")
}

/// Least model of the positive definite program `p` extended with the given
/// parameter atoms as facts, computed as the least fixpoint of the one-step
/// consequence operator.
pub fn least_model(
    p: &NormalProgram,
    fixed_params: &Interpretation,
) -> Result<Interpretation, SemanticsError> {
    for (idx, rule) in p.rules().iter().enumerate() {
        if !rule.is_positive() {
            return Err(SemanticsError::NotPositive(idx));
        }
        if rule.is_constraint() {
            return Err(SemanticsError::Headless(idx));
        }
    }
    for atom in fixed_params.iter() {
        if !p.parameters().contains(&atom) {
            return Err(SemanticsError::FactOutsideParameters(
                p.symbols().name(atom).to_string(),
            ));
        }
    }
    Ok(Interpretation::from(definite_fixpoint(
        p.rules().iter().map(|r| (r.head(), r.pos_body())),
        fixed_params.iter(),
    )))
}

/// Shared fixpoint engine: takes definite rules as `(Some(head), pos_body)`
/// pairs (headless entries are ignored) plus seed facts.
fn definite_fixpoint<'a>(
    rules: impl Iterator<Item = (Option<AtomId>, &'a AtomSet)>,
    seeds: impl Iterator<Item = AtomId>,
) -> AtomSet {
    struct Pending {
        head: AtomId,
        missing: usize,
    }
    let mut pending: Vec<Pending> = Vec::new();
    // For each atom, the rules waiting on it.
    let mut watchers: std::collections::HashMap<AtomId, Vec<usize>> =
        std::collections::HashMap::new();
    let mut derived = AtomSet::new();
    let mut queue: VecDeque<AtomId> = VecDeque::new();

    for (head, pos) in rules {
        let Some(head) = head else { continue };
        if pos.is_empty() {
            if derived.insert(head) {
                queue.push_back(head);
            }
            continue;
        }
        let idx = pending.len();
        pending.push(Pending {
            head,
            missing: pos.len(),
        });
        for &a in pos {
            watchers.entry(a).or_default().push(idx);
        }
    }
    for seed in seeds {
        if derived.insert(seed) {
            queue.push_back(seed);
        }
    }
    while let Some(atom) = queue.pop_front() {
        let Some(waiting) = watchers.get(&atom) else {
            continue;
        };
        for &idx in waiting {
            let rule = &mut pending[idx];
            rule.missing -= 1;
            if rule.missing == 0 && derived.insert(rule.head) {
                queue.push_back(rule.head);
            }
        }
    }
    derived
}

/// True iff every rule whose body is satisfied by `i` has its head in `i`.
/// A constraint with satisfied body falsifies modelhood.
pub fn is_model(p: &NormalProgram, i: &Interpretation) -> bool {
    debug_assert!(i.is_subset(p.vocabulary()));
    p.rules().iter().all(|r| {
        let body_holds = r.pos_body().iter().all(|a| i.contains(*a))
            && r.neg_body().iter().all(|a| !i.contains(*a));
        !body_holds || r.head().is_some_and(|h| i.contains(h))
    })
}

/// Parameterized stability: `i` is stable iff it equals the least model of
/// the reduct extended with `i`'s parameter atoms as facts, and satisfies
/// every constraint surviving the reduct.
pub fn is_stable(p: &NormalProgram, i: &Interpretation) -> bool {
    assert!(
        i.is_subset(p.vocabulary()),
        "interpretation mentions atoms outside the program vocabulary"
    );
    // Fused reduct + fixpoint; equivalent to
    // `least_model(reduct(p, i), i ∩ parameters) == i` plus the constraint
    // check, without materializing the reduct.
    let kept = p
        .rules()
        .iter()
        .filter(|r| r.neg_body().iter().all(|b| !i.contains(*b)));
    let mut definite: Vec<(Option<AtomId>, &AtomSet)> = Vec::new();
    for rule in kept {
        match rule.head() {
            Some(_) => definite.push((rule.head(), rule.pos_body())),
            None => {
                // Surviving constraint: its positive body must not hold.
                if rule.pos_body().iter().all(|a| i.contains(*a)) {
                    return false;
                }
            }
        }
    }
    let facts = i.restrict(p.parameters());
    let lm = definite_fixpoint(definite.into_iter(), facts.iter());
    &lm == i.as_set()
}

/// Stable-unstable membership for a combined program.
///
/// `inner_oracle(inner, target)` must decide whether `inner` has a
/// stable-unstable model that coincides with `target` on the shared
/// vocabulary, where `target` is already projected onto the shared set
/// (equal to `inner.outer().parameters()`).
pub fn is_stable_unstable<E, F>(
    c: &KCombinedProgram,
    i: &Interpretation,
    mut inner_oracle: F,
) -> Result<bool, E>
where
    F: FnMut(&KCombinedProgram, &Interpretation) -> Result<bool, E>,
{
    assert!(
        i.is_subset(c.outer().vocabulary()),
        "interpretation mentions atoms outside the outer vocabulary"
    );
    if !is_stable(c.outer(), i) {
        return Ok(false);
    }
    match c.inner() {
        None => Ok(true),
        Some(inner) => {
            let target = i.restrict(&c.shared());
            Ok(!inner_oracle(inner, &target)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{tiny_triple, ProgramSketch};

    #[test]
    fn reduct_drops_rules_with_true_negative_literals() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(
            &["a", "b"],
            &[],
            &[(Some("a"), &[], &["b"]), (Some("b"), &[], &["a"])],
        );
        let i = sketch.interpretation(&["a"]);
        let r = reduct(&p, &i);
        assert_eq!(r.rules().len(), 1);
        assert_eq!(r.rules()[0], Rule::fact(sketch.table.lookup("a").unwrap()));
        assert_eq!(r.vocabulary(), p.vocabulary());
    }

    #[test]
    fn reduct_of_positive_program_is_identity_on_rules() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(
            &["a", "b", "c"],
            &[],
            &[(Some("b"), &["a"], &[]), (Some("c"), &["a", "b"], &[])],
        );
        let i = sketch.interpretation(&["a", "c"]);
        assert_eq!(reduct(&p, &i), p);
    }

    #[test]
    fn reduct_can_empty_the_program() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(&["c"], &[], &[(Some("c"), &[], &["c"])]);
        let i = sketch.interpretation(&["c"]);
        assert!(reduct(&p, &i).rules().is_empty());
    }

    #[test]
    fn least_model_reaches_the_fixpoint() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(&["a", "b"], &["a"], &[(Some("b"), &["a"], &[])]);
        let lm = least_model(&p, &sketch.interpretation(&["a"])).unwrap();
        assert_eq!(lm, sketch.interpretation(&["a", "b"]));
        let lm = least_model(&p, &Interpretation::empty()).unwrap();
        assert!(lm.is_empty());
    }

    #[test]
    fn least_model_matches_exhaustive_minimum_on_a_chain() {
        // r(v0). r(Y) <- r(X), next(X,Y). over a three-node chain.
        let sketch = ProgramSketch::new();
        let p = sketch.program(
            &[
                "r(v0)",
                "r(v1)",
                "r(v2)",
                "next(v0,v1)",
                "next(v1,v2)",
            ],
            &[],
            &[
                (Some("r(v0)"), &[], &[]),
                (Some("next(v0,v1)"), &[], &[]),
                (Some("next(v1,v2)"), &[], &[]),
                (Some("r(v1)"), &["r(v0)", "next(v0,v1)"], &[]),
                (Some("r(v2)"), &["r(v1)", "next(v1,v2)"], &[]),
            ],
        );
        let lm = least_model(&p, &Interpretation::empty()).unwrap();

        // Independent oracle: enumerate all interpretations, keep the models,
        // take the subset-minimum.
        let vocab: Vec<_> = p.vocabulary().iter().copied().collect();
        let mut models: Vec<Interpretation> = Vec::new();
        for mask in 0u32..(1 << vocab.len()) {
            let i: Interpretation = vocab
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &a)| a)
                .collect();
            if is_model(&p, &i) {
                models.push(i);
            }
        }
        let minimum = models
            .iter()
            .find(|m| models.iter().all(|other| m.as_set().is_subset(other.as_set())))
            .expect("a positive program has a least model");
        assert_eq!(&lm, minimum);
        assert_eq!(lm, sketch.interpretation(&["r(v0)", "r(v1)", "r(v2)", "next(v0,v1)", "next(v1,v2)"]));
    }

    #[test]
    fn least_model_rejects_non_positive_input() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(&["a", "b"], &[], &[(Some("b"), &[], &["a"])]);
        assert_eq!(
            least_model(&p, &Interpretation::empty()),
            Err(SemanticsError::NotPositive(0))
        );
        let q = sketch.program(&["a"], &[], &[(None, &["a"], &[])]);
        assert_eq!(
            least_model(&q, &Interpretation::empty()),
            Err(SemanticsError::Headless(0))
        );
        let r = sketch.program(&["a", "b"], &["a"], &[(Some("b"), &["a"], &[])]);
        assert_eq!(
            least_model(&r, &sketch.interpretation(&["b"])),
            Err(SemanticsError::FactOutsideParameters("b".into()))
        );
    }

    #[test]
    fn modelhood_follows_rule_satisfaction() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(&["a", "b"], &[], &[(Some("b"), &["a"], &[])]);
        assert!(!is_model(&p, &sketch.interpretation(&["a"])));
        assert!(is_model(&p, &sketch.interpretation(&["a", "b"])));
        assert!(is_model(&p, &Interpretation::empty()));
    }

    #[test]
    fn constraints_block_modelhood_and_stability() {
        let sketch = ProgramSketch::new();
        let p = sketch.program(
            &["a"],
            &[],
            &[(Some("a"), &[], &[]), (None, &["a"], &[])],
        );
        let i = sketch.interpretation(&["a"]);
        assert!(!is_model(&p, &i));
        assert!(!is_stable(&p, &i));
        assert!(!is_stable(&p, &Interpretation::empty()));
    }

    #[test]
    fn stability_on_the_generator_fixture() {
        let fx = tiny_triple();
        assert!(is_stable(
            &fx.generator,
            &fx.interpretation(&["d", "a", "b"])
        ));
        // b alone has no support without a.
        assert!(!is_stable(&fx.generator, &fx.interpretation(&["b"])));
    }

    #[test]
    fn self_support_is_not_stable() {
        let fx = tiny_triple();
        assert!(!is_stable(&fx.third, &fx.interpretation(&["e", "d"])));
        assert!(is_stable(&fx.third, &Interpretation::empty()));
    }

    #[test]
    fn fused_stability_agrees_with_the_definition() {
        // is_stable must equal the composed reduct/least-model route on
        // programs without constraints.
        let fx = tiny_triple();
        for p in [&fx.generator, &fx.third] {
            let vocab: Vec<_> = p.vocabulary().iter().copied().collect();
            for mask in 0u32..(1 << vocab.len()) {
                let i: Interpretation = vocab
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &a)| a)
                    .collect();
                let r = reduct(p, &i);
                let lm = least_model(&r, &i.restrict(p.parameters())).unwrap();
                assert_eq!(is_stable(p, &i), lm == i, "mismatch on {i:?}");
            }
        }
    }

    #[test]
    fn stable_unstable_on_the_fixture_pair() {
        let fx = tiny_triple();
        let pair = fx.pair();
        // Exhaustive oracle over the tester's vocabulary.
        let oracle = |inner: &KCombinedProgram, target: &Interpretation| -> Result<bool, ()> {
            let vocab: Vec<_> = inner.outer().vocabulary().iter().copied().collect();
            let shared = inner.outer().parameters().clone();
            for mask in 0u32..(1 << vocab.len()) {
                let j: Interpretation = vocab
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &a)| a)
                    .collect();
                if is_stable(inner.outer(), &j) && &j.restrict(&shared) == target {
                    return Ok(true);
                }
            }
            Ok(false)
        };
        assert_eq!(
            is_stable_unstable(&pair, &fx.interpretation(&["d", "a", "b"]), oracle),
            Ok(true)
        );
        // {d} coincides with the tester's stable model {d} on {b,d}.
        assert_eq!(
            is_stable_unstable(&pair, &fx.interpretation(&["d"]), oracle),
            Ok(false)
        );
    }

    #[test]
    fn stable_unstable_at_depth_three() {
        let fx = tiny_triple();
        let triple = fx.triple();
        // Oracle recursing through is_stable_unstable itself, exhaustively.
        fn brute_oracle(
            c: &KCombinedProgram,
            target: &Interpretation,
        ) -> Result<bool, std::convert::Infallible> {
            let vocab: Vec<_> = c.outer().vocabulary().iter().copied().collect();
            let shared = c.outer().parameters().clone();
            for mask in 0u32..(1 << vocab.len()) {
                let j: Interpretation = vocab
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &a)| a)
                    .collect();
                if &j.restrict(&shared) == target && is_stable_unstable(c, &j, brute_oracle)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        assert_eq!(
            is_stable_unstable(&triple, &Interpretation::empty(), brute_oracle),
            Ok(true)
        );
        assert_eq!(
            is_stable_unstable(&triple, &fx.interpretation(&["e", "d"]), brute_oracle),
            Ok(false)
        );
    }
}
