//! A small conflict-driven clause-learning SAT core: two-watched-literal
//! propagation, first-UIP learning, activity-based decisions with phase
//! saving, and assumption-based solving. Clauses can be added between solves;
//! learnt clauses are kept for the lifetime of the solver.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A literal; bit 0 is the sign (1 = negated).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit(var.0 << 1 | u32::from(!positive))
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.is_positive() { "" } else { "-" }, self.var().0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Value {
    True,
    False,
    Undef,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SolveOutcome {
    /// Satisfiable under the given assumptions.
    Sat,
    /// Unsatisfiable together with the assumptions.
    UnsatUnderAssumptions,
    /// Unsatisfiable outright.
    Unsat,
}

#[derive(Clone, Debug)]
struct Clause {
    lits: Vec<Lit>,
}

#[derive(Clone, Copy, Debug)]
struct Watcher {
    clause: u32,
    blocker: Lit,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, Debug)]
pub struct SatStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub learnt_clauses: u64,
}

pub struct SatSolver {
    num_vars: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<Value>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    reason: Vec<Option<u32>>,
    level: Vec<u32>,
    seen: Vec<bool>,
    ok: bool,
    pub stats: SatStats,
}

const ACTIVITY_DECAY: f64 = 1.0 / 0.95;
const ACTIVITY_RESCALE: f64 = 1e100;

/// Mixes the seed into per-variable activity jitter so different seeds
/// explore in different orders while staying fully deterministic.
fn seed_jitter(seed: u64, var: usize) -> f64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((var as u64) << 32 | var as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z as f64 / u64::MAX as f64) * 1e-6
}

impl SatSolver {
    pub fn new(num_vars: usize, seed: u64) -> Self {
        SatSolver {
            num_vars,
            clauses: Vec::new(),
            watches: vec![Vec::new(); num_vars * 2],
            assigns: vec![Value::Undef; num_vars],
            phase: vec![false; num_vars],
            activity: (0..num_vars).map(|v| seed_jitter(seed, v)).collect(),
            var_inc: 1.0,
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            reason: vec![None; num_vars],
            level: vec![0; num_vars],
            seen: vec![false; num_vars],
            ok: true,
            stats: SatStats::default(),
        }
    }

    fn value(&self, lit: Lit) -> Value {
        match self.assigns[lit.var().index()] {
            Value::Undef => Value::Undef,
            Value::True => {
                if lit.is_positive() {
                    Value::True
                } else {
                    Value::False
                }
            }
            Value::False => {
                if lit.is_positive() {
                    Value::False
                } else {
                    Value::True
                }
            }
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a clause, simplifying against the root-level assignment. Returns
    /// false once the formula is unsatisfiable outright.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        self.cancel_until(0);
        if !self.ok {
            return false;
        }
        let mut lits: Vec<Lit> = lits.to_vec();
        lits.sort_unstable();
        lits.dedup();
        // Tautology or already satisfied at the root.
        if lits.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        if lits.iter().any(|&l| self.value(l) == Value::True) {
            return true;
        }
        lits.retain(|&l| self.value(l) != Value::False);
        match lits.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(Clause { lits });
                true
            }
        }
    }

    fn attach(&mut self, clause: Clause) -> u32 {
        let cref = u32::try_from(self.clauses.len()).expect("clause store overflow");
        let w0 = Watcher {
            clause: cref,
            blocker: clause.lits[1],
        };
        let w1 = Watcher {
            clause: cref,
            blocker: clause.lits[0],
        };
        self.watches[(!clause.lits[0]).index()].push(w0);
        self.watches[(!clause.lits[1]).index()].push(w1);
        self.clauses.push(clause);
        cref
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<u32>) {
        debug_assert_eq!(self.value(lit), Value::Undef);
        let v = lit.var().index();
        self.assigns[v] = if lit.is_positive() {
            Value::True
        } else {
            Value::False
        };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            // Clauses watching ¬p registered themselves under p.
            let falsified = !p;
            let mut ws = std::mem::take(&mut self.watches[p.index()]);
            let mut i = 0;
            while i < ws.len() {
                let w = ws[i];
                if self.value(w.blocker) == Value::True {
                    i += 1;
                    continue;
                }
                let cref = w.clause as usize;
                // Put the falsified literal at position 1.
                if self.clauses[cref].lits[0] == falsified {
                    self.clauses[cref].lits.swap(0, 1);
                }
                debug_assert_eq!(self.clauses[cref].lits[1], falsified);
                let first = self.clauses[cref].lits[0];
                if self.value(first) == Value::True {
                    ws[i].blocker = first;
                    i += 1;
                    continue;
                }
                // Look for a replacement watch.
                let mut moved = false;
                for k in 2..self.clauses[cref].lits.len() {
                    if self.value(self.clauses[cref].lits[k]) != Value::False {
                        self.clauses[cref].lits.swap(1, k);
                        let new_watch = self.clauses[cref].lits[1];
                        self.watches[(!new_watch).index()].push(Watcher {
                            clause: w.clause,
                            blocker: first,
                        });
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.value(first) == Value::False {
                    // Conflict: restore the remaining watchers.
                    self.watches[p.index()].append(&mut ws);
                    self.qhead = self.trail.len();
                    return Some(w.clause);
                }
                self.enqueue(first, Some(w.clause));
                i += 1;
            }
            self.watches[p.index()].append(&mut ws);
        }
        None
    }

    fn cancel_until(&mut self, target: usize) {
        if self.decision_level() <= target {
            return;
        }
        let bound = self.trail_lim[target];
        for idx in (bound..self.trail.len()).rev() {
            let lit = self.trail[idx];
            let v = lit.var().index();
            self.phase[v] = lit.is_positive();
            self.assigns[v] = Value::Undef;
            self.reason[v] = None;
        }
        self.trail.truncate(bound);
        self.trail_lim.truncate(target);
        self.qhead = bound;
    }

    fn bump(&mut self, var: Var) {
        self.activity[var.index()] += self.var_inc;
        if self.activity[var.index()] > ACTIVITY_RESCALE {
            for a in &mut self.activity {
                *a /= ACTIVITY_RESCALE;
            }
            self.var_inc /= ACTIVITY_RESCALE;
        }
    }

    /// First-UIP conflict analysis; returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, conflict: u32) -> (Vec<Lit>, usize) {
        let mut learnt: Vec<Lit> = vec![Lit::new(Var(0), true)];
        let mut counter = 0usize;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        let mut confl = conflict as usize;
        loop {
            // For reason clauses the implied literal sits at position 0 and
            // is the one being resolved on; skip it.
            let start = usize::from(p.is_some());
            for j in start..self.clauses[confl].lits.len() {
                let q = self.clauses[confl].lits[j];
                let v = q.var();
                if !self.seen[v.index()] && self.level[v.index()] > 0 {
                    self.seen[v.index()] = true;
                    self.bump(v);
                    if self.level[v.index()] as usize >= self.decision_level() {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // Select the next trail literal that contributed.
            loop {
                index -= 1;
                if self.seen[self.trail[index].var().index()] {
                    break;
                }
            }
            let lit = self.trail[index];
            self.seen[lit.var().index()] = false;
            counter -= 1;
            p = Some(lit);
            if counter == 0 {
                break;
            }
            confl = self.reason[lit.var().index()].expect("non-decision must have a reason") as usize;
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }
        let backjump = learnt[1..]
            .iter()
            .map(|l| self.level[l.var().index()] as usize)
            .max()
            .unwrap_or(0);
        (learnt, backjump)
    }

    fn pick_branch_var(&self) -> Option<Var> {
        let mut best: Option<Var> = None;
        let mut best_activity = f64::NEG_INFINITY;
        for v in 0..self.num_vars {
            if self.assigns[v] == Value::Undef && self.activity[v] > best_activity {
                best_activity = self.activity[v];
                best = Some(Var(v as u32));
            }
        }
        best
    }

    /// Searches for a model consistent with `assumptions`.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveOutcome {
        self.cancel_until(0);
        if !self.ok {
            return SolveOutcome::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SolveOutcome::Unsat;
        }
        loop {
            if let Some(conflict) = self.propagate() {
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveOutcome::Unsat;
                }
                let (learnt, backjump) = self.analyze(conflict);
                self.cancel_until(backjump);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let mut clause = Clause { lits: learnt };
                    // Watch the asserting literal and one literal from the
                    // backjump level.
                    let swap_to = clause
                        .lits
                        .iter()
                        .enumerate()
                        .skip(1)
                        .max_by_key(|(_, l)| self.level[l.var().index()])
                        .map(|(k, _)| k)
                        .unwrap();
                    clause.lits.swap(1, swap_to);
                    let cref = self.attach(clause);
                    self.stats.learnt_clauses += 1;
                    self.enqueue(asserting, Some(cref));
                }
                self.var_inc *= ACTIVITY_DECAY;
                continue;
            }
            // Install pending assumptions, one decision level each.
            if self.decision_level() < assumptions.len() {
                let a = assumptions[self.decision_level()];
                match self.value(a) {
                    Value::True => {
                        self.trail_lim.push(self.trail.len());
                    }
                    Value::False => return SolveOutcome::UnsatUnderAssumptions,
                    Value::Undef => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(a, None);
                    }
                }
                continue;
            }
            if self.trail.len() == self.num_vars {
                return SolveOutcome::Sat;
            }
            let var = self.pick_branch_var().expect("unassigned variable exists");
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.enqueue(Lit::new(var, self.phase[var.index()]), None);
        }
    }

    /// Value of `var` in the most recent model. Only meaningful right after
    /// a `Sat` outcome.
    pub fn model_value(&self, var: Var) -> bool {
        debug_assert_ne!(self.assigns[var.index()], Value::Undef);
        self.assigns[var.index()] == Value::True
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: u32, pos: bool) -> Lit {
        Lit::new(Var(v), pos)
    }

    #[test]
    fn propagates_simple_implications() {
        let mut s = SatSolver::new(3, 0);
        // 0, 0 -> 1, 1 -> 2
        assert!(s.add_clause(&[lit(0, true)]));
        assert!(s.add_clause(&[lit(0, false), lit(1, true)]));
        assert!(s.add_clause(&[lit(1, false), lit(2, true)]));
        assert_eq!(s.solve(&[]), SolveOutcome::Sat);
        assert!(s.model_value(Var(0)));
        assert!(s.model_value(Var(1)));
        assert!(s.model_value(Var(2)));
    }

    #[test]
    fn detects_unsatisfiable_cores() {
        let mut s = SatSolver::new(2, 0);
        assert!(s.add_clause(&[lit(0, true), lit(1, true)]));
        assert!(s.add_clause(&[lit(0, true), lit(1, false)]));
        assert!(s.add_clause(&[lit(0, false), lit(1, true)]));
        assert!(s.add_clause(&[lit(0, false), lit(1, false)]));
        assert_eq!(s.solve(&[]), SolveOutcome::Unsat);
        assert_eq!(s.solve(&[]), SolveOutcome::Unsat);
    }

    #[test]
    fn assumptions_restrict_but_do_not_commit() {
        let mut s = SatSolver::new(2, 0);
        assert!(s.add_clause(&[lit(0, true), lit(1, true)]));
        assert!(s.add_clause(&[lit(0, false), lit(1, false)]));
        assert_eq!(s.solve(&[lit(0, true)]), SolveOutcome::Sat);
        assert!(s.model_value(Var(0)));
        assert!(!s.model_value(Var(1)));
        assert_eq!(
            s.solve(&[lit(0, true), lit(1, true)]),
            SolveOutcome::UnsatUnderAssumptions
        );
        // Still satisfiable without the bad assumption pair.
        assert_eq!(s.solve(&[lit(1, true)]), SolveOutcome::Sat);
        assert!(!s.model_value(Var(0)));
    }

    #[test]
    fn incremental_clauses_survive_solves() {
        let mut s = SatSolver::new(3, 0);
        assert!(s.add_clause(&[lit(0, true), lit(1, true), lit(2, true)]));
        let mut models = 0;
        loop {
            match s.solve(&[]) {
                SolveOutcome::Sat => {
                    models += 1;
                    let block: Vec<Lit> = (0..3)
                        .map(|v| Lit::new(Var(v), !s.model_value(Var(v))))
                        .collect();
                    if !s.add_clause(&block) {
                        break;
                    }
                }
                _ => break,
            }
        }
        assert_eq!(models, 7);
    }

    /// Exhaustive cross-check against truth-table satisfiability on all
    /// 3-variable clause sets drawn from a fixed pool.
    #[test]
    fn agrees_with_truth_tables() {
        let pool: Vec<Vec<Lit>> = vec![
            vec![lit(0, true), lit(1, true)],
            vec![lit(0, false), lit(2, true)],
            vec![lit(1, false), lit(2, false)],
            vec![lit(0, true), lit(1, false), lit(2, true)],
            vec![lit(0, false)],
            vec![lit(1, true), lit(2, true)],
        ];
        for mask in 0u32..(1 << pool.len()) {
            let picked: Vec<&Vec<Lit>> = pool
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, c)| c)
                .collect();
            let brute_sat = (0u32..8).any(|bits| {
                picked.iter().all(|cl| {
                    cl.iter().any(|l| {
                        let val = bits & (1 << l.var().0) != 0;
                        val == l.is_positive()
                    })
                })
            });
            let mut s = SatSolver::new(3, 7);
            let mut consistent = true;
            for cl in &picked {
                consistent &= s.add_clause(cl);
            }
            let solver_sat = consistent && s.solve(&[]) == SolveOutcome::Sat;
            assert_eq!(solver_sat, brute_sat, "clause mask {mask:#b}");
        }
    }
}
