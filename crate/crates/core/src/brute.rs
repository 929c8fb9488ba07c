//! Exhaustive, definition-level reference solvers. Deliberately exponential;
//! they serve as ground truth for the engine, the counterexample-guided
//! search, and every encoder.

use std::collections::{BTreeMap, BTreeSet};

use crate::instances::{LabeledGraph, ParityGame, Player, QbfInstance};
use crate::program::{Interpretation, KCombinedProgram, NormalProgram};
use crate::semantics::is_stable;

/// Size caps for the reference solvers. These are configuration values so
/// test harnesses can widen them where an instance family needs it.
#[derive(Clone, Copy, Debug)]
pub struct BruteForceConfig {
    /// Cap on the total vocabulary size enumerated over (per program for
    /// stable-model enumeration, summed over levels for combined programs).
    pub max_vocabulary_atoms: usize,
    /// Cap on the number of quantified variables in a formula.
    pub max_qbf_variables: usize,
    /// Cap on the product of both players' positional strategy counts.
    pub max_strategy_profiles: u64,
    /// Cap on the node count of a labeled graph.
    pub max_graph_nodes: usize,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        Self {
            max_vocabulary_atoms: 20,
            max_qbf_variables: 16,
            max_strategy_profiles: 1 << 20,
            max_graph_nodes: 10,
        }
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
#[error("brute-force cap exceeded: {what} is {actual}, cap is {cap}")]
pub struct CapExceeded {
    pub what: &'static str,
    pub actual: u64,
    pub cap: u64,
}

fn check_cap(what: &'static str, actual: u64, cap: u64) -> Result<(), CapExceeded> {
    if actual > cap {
        Err(CapExceeded { what, actual, cap })
    } else {
        Ok(())
    }
}

/// Exactly the parameterized stable models of `p`, found by testing every
/// subset of the vocabulary.
pub fn enum_stable_bf(
    p: &NormalProgram,
    cfg: &BruteForceConfig,
) -> Result<BTreeSet<Interpretation>, CapExceeded> {
    let vocab: Vec<_> = p.vocabulary().iter().copied().collect();
    check_cap(
        "vocabulary atoms",
        vocab.len() as u64,
        cfg.max_vocabulary_atoms.min(62) as u64,
    )?;
    let mut out = BTreeSet::new();
    for mask in 0u64..(1u64 << vocab.len()) {
        let i: Interpretation = vocab
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &a)| a)
            .collect();
        if is_stable(p, &i) {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Exactly the stable-unstable models of `c`: the outer stable models whose
/// projection onto the boundary is not realized by any stable-unstable model
/// of the inner level, computed recursively.
pub fn enum_su_bf(
    c: &KCombinedProgram,
    cfg: &BruteForceConfig,
) -> Result<BTreeSet<Interpretation>, CapExceeded> {
    check_cap(
        "total vocabulary atoms",
        c.total_vocabulary_atoms() as u64,
        cfg.max_vocabulary_atoms as u64,
    )?;
    enum_su_rec(c, cfg)
}

fn enum_su_rec(
    c: &KCombinedProgram,
    cfg: &BruteForceConfig,
) -> Result<BTreeSet<Interpretation>, CapExceeded> {
    let outer_models = enum_stable_bf(c.outer(), cfg)?;
    let Some(inner) = c.inner() else {
        return Ok(outer_models);
    };
    let shared = c.shared();
    let inner_models = enum_su_rec(inner, cfg)?;
    let refutable: BTreeSet<Interpretation> = inner_models
        .into_iter()
        .map(|j| j.restrict(&shared))
        .collect();
    Ok(outer_models
        .into_iter()
        .filter(|i| !refutable.contains(&i.restrict(&shared)))
        .collect())
}

/// Game-tree evaluation of a prefixed Boolean formula.
pub fn eval_qbf_bf(q: &QbfInstance, cfg: &BruteForceConfig) -> Result<bool, CapExceeded> {
    let vars = q.variables();
    check_cap(
        "quantified variables",
        vars.len() as u64,
        cfg.max_qbf_variables as u64,
    )?;
    let prefix: Vec<(crate::instances::Quantifier, u32)> = q
        .blocks
        .iter()
        .flat_map(|b| b.variables.iter().map(|&v| (b.quantifier, v)))
        .collect();
    let mut assignment = BTreeMap::new();
    Ok(eval_rec(q, &prefix, 0, &mut assignment))
}

fn eval_rec(
    q: &QbfInstance,
    prefix: &[(crate::instances::Quantifier, u32)],
    idx: usize,
    assignment: &mut BTreeMap<u32, bool>,
) -> bool {
    use crate::instances::Quantifier;
    if idx == prefix.len() {
        return q.matrix.eval(assignment);
    }
    let (quant, var) = prefix[idx];
    let mut outcomes = [false, true].into_iter().map(|value| {
        assignment.insert(var, value);
        let r = eval_rec(q, prefix, idx + 1, assignment);
        assignment.remove(&var);
        r
    });
    match quant {
        Quantifier::Exists => outcomes.any(|r| r),
        Quantifier::Forall => outcomes.all(|r| r),
    }
}

/// Winner of a parity game plus a witness positional strategy, found by
/// enumerating positional strategies of both players.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParityOutcome {
    pub winner: Player,
    /// Chosen successor per node owned by the winner.
    pub strategy: BTreeMap<usize, usize>,
}

/// Positional strategies of `player`: all ways of fixing one successor per
/// owned node.
pub fn positional_strategies(g: &ParityGame, player: Player) -> Vec<BTreeMap<usize, usize>> {
    let owned: Vec<usize> = (0..g.nodes.len()).filter(|&v| g.owner[v] == player).collect();
    let choices: Vec<Vec<usize>> = owned.iter().map(|&v| g.successors(v)).collect();
    let mut out = vec![BTreeMap::new()];
    for (node_idx, options) in choices.iter().enumerate() {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for partial in &out {
            for &succ in options {
                let mut extended = partial.clone();
                extended.insert(owned[node_idx], succ);
                next.push(extended);
            }
        }
        out = next;
    }
    out
}

/// The unique play conforming to both positional strategies is a lasso;
/// returns the winner by the least priority on its cycle.
pub fn play_winner(
    g: &ParityGame,
    exists: &BTreeMap<usize, usize>,
    forall: &BTreeMap<usize, usize>,
) -> Player {
    let next = |v: usize| -> usize {
        match g.owner[v] {
            Player::Exists => exists[&v],
            Player::Forall => forall[&v],
        }
    };
    let mut seen_at: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order = Vec::new();
    let mut v = g.initial;
    loop {
        if let Some(&start) = seen_at.get(&v) {
            let min_priority = order[start..].iter().map(|&u| g.priority[u]).min().unwrap();
            return if min_priority % 2 == 0 {
                Player::Exists
            } else {
                Player::Forall
            };
        }
        seen_at.insert(v, order.len());
        order.push(v);
        v = next(v);
    }
}

pub fn solve_parity_bf(
    g: &ParityGame,
    cfg: &BruteForceConfig,
) -> Result<ParityOutcome, CapExceeded> {
    g.validate().expect("parity game must be valid");
    let profile_count = |player: Player| -> u64 {
        (0..g.nodes.len())
            .filter(|&v| g.owner[v] == player)
            .map(|v| g.successors(v).len() as u64)
            .product()
    };
    check_cap(
        "strategy profiles",
        profile_count(Player::Exists).saturating_mul(profile_count(Player::Forall)),
        cfg.max_strategy_profiles,
    )?;

    let exists_strategies = positional_strategies(g, Player::Exists);
    let forall_strategies = positional_strategies(g, Player::Forall);
    for se in &exists_strategies {
        if forall_strategies
            .iter()
            .all(|sf| play_winner(g, se, sf) == Player::Exists)
        {
            return Ok(ParityOutcome {
                winner: Player::Exists,
                strategy: se.clone(),
            });
        }
    }
    for sf in &forall_strategies {
        if exists_strategies
            .iter()
            .all(|se| play_winner(g, se, sf) == Player::Forall)
        {
            return Ok(ParityOutcome {
                winner: Player::Forall,
                strategy: sf.clone(),
            });
        }
    }
    unreachable!("parity games are positionally determined");
}

/// Consistent set of literals over named variables; insertion fails on a
/// complementary pair.
#[derive(Clone, Default, Debug)]
struct LiteralSet(BTreeMap<String, bool>);

impl LiteralSet {
    fn insert(&mut self, var: &str, positive: bool) -> bool {
        match self.0.get(var) {
            Some(&p) => p == positive,
            None => {
                self.0.insert(var.to_owned(), positive);
                true
            }
        }
    }
}

/// Decides whether the target node is a point of no return: reachable from
/// the initial node along a node-simple path with consistent labels that
/// cannot be extended by any node-simple return path keeping the combined
/// label set consistent.
///
/// Node-simple paths match the pick-based program encoding of the problem;
/// since labels are literals, repeating an arc never adds a constraint.
pub fn is_ponr_bf(g: &LabeledGraph, cfg: &BruteForceConfig) -> Result<bool, CapExceeded> {
    g.validate().expect("labeled graph must be valid");
    check_cap(
        "graph nodes",
        g.nodes.len() as u64,
        cfg.max_graph_nodes as u64,
    )?;
    if g.initial == g.target {
        // The empty return path is always consistent.
        return Ok(false);
    }
    let mut outgoing: Vec<Vec<(usize, &crate::instances::ArcLabel)>> =
        vec![Vec::new(); g.nodes.len()];
    for (src, dst, label) in &g.arcs {
        outgoing[*src].push((*dst, label));
    }

    // DFS over node-simple forward paths; at the target, search for any
    // consistent node-simple return path.
    fn forward(
        outgoing: &[Vec<(usize, &crate::instances::ArcLabel)>],
        here: usize,
        target: usize,
        initial: usize,
        visited: &mut Vec<bool>,
        labels: &mut LiteralSet,
    ) -> bool {
        if here == target {
            let mut return_visited = vec![false; visited.len()];
            return_visited[target] = true;
            return !returns(outgoing, target, initial, &mut return_visited, labels.clone());
        }
        for &(next, label) in &outgoing[here] {
            if visited[next] {
                continue;
            }
            let mut extended = labels.clone();
            if !extended.insert(&label.variable, label.positive) {
                continue;
            }
            visited[next] = true;
            let found = forward(outgoing, next, target, initial, visited, &mut extended);
            visited[next] = false;
            if found {
                return true;
            }
        }
        false
    }

    fn returns(
        outgoing: &[Vec<(usize, &crate::instances::ArcLabel)>],
        here: usize,
        initial: usize,
        visited: &mut Vec<bool>,
        labels: LiteralSet,
    ) -> bool {
        if here == initial {
            return true;
        }
        for &(next, label) in &outgoing[here] {
            if visited[next] {
                continue;
            }
            let mut extended = labels.clone();
            if !extended.insert(&label.variable, label.positive) {
                continue;
            }
            visited[next] = true;
            let found = returns(outgoing, next, initial, visited, extended);
            visited[next] = false;
            if found {
                return true;
            }
        }
        false
    }

    let mut visited = vec![false; g.nodes.len()];
    visited[g.initial] = true;
    let mut labels = LiteralSet::default();
    Ok(forward(
        &outgoing,
        g.initial,
        g.target,
        g.initial,
        &mut visited,
        &mut labels,
    ))
}
