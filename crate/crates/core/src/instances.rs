//! Application instance types: quantified Boolean formulas with a block
//! prefix, parity games, and literal-labeled graphs.

use std::collections::{BTreeMap, BTreeSet};

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("variable {0} is quantified more than once")]
    DuplicateVariable(u32),
    #[error("matrix variable {0} is not quantified")]
    UnquantifiedVariable(u32),
    #[error("node index {0} is out of range")]
    NodeOutOfRange(usize),
    #[error("node `{0}` has no outgoing arc")]
    NodeWithoutArc(String),
    #[error("owner/priority maps must cover every node")]
    IncompleteNodeMaps,
    #[error("more than one arc from `{0}` to `{1}`")]
    ParallelArc(String, String),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn flipped(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// A signed propositional variable; variables are positive integers.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct QbfLit {
    pub variable: u32,
    pub positive: bool,
}

impl QbfLit {
    pub fn pos(variable: u32) -> Self {
        Self {
            variable,
            positive: true,
        }
    }

    pub fn neg(variable: u32) -> Self {
        Self {
            variable,
            positive: false,
        }
    }
}

/// Matrix of a prefixed formula: a disjunction of cubes or a conjunction of
/// clauses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Matrix {
    Dnf(Vec<Vec<QbfLit>>),
    Cnf(Vec<Vec<QbfLit>>),
}

impl Matrix {
    pub fn terms(&self) -> &[Vec<QbfLit>] {
        match self {
            Matrix::Dnf(t) | Matrix::Cnf(t) => t,
        }
    }

    pub fn eval(&self, assignment: &BTreeMap<u32, bool>) -> bool {
        let lit_true =
            |l: &QbfLit| assignment.get(&l.variable).copied().unwrap_or(false) == l.positive;
        match self {
            Matrix::Dnf(cubes) => cubes.iter().any(|cube| cube.iter().all(lit_true)),
            Matrix::Cnf(clauses) => clauses.iter().all(|cl| cl.iter().any(lit_true)),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuantifierBlock {
    pub quantifier: Quantifier,
    pub variables: Vec<u32>,
}

/// A prefixed Boolean formula. After [`QbfInstance::canonicalize`], adjacent
/// blocks alternate quantifiers and no block is empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QbfInstance {
    pub blocks: Vec<QuantifierBlock>,
    pub matrix: Matrix,
}

impl QbfInstance {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let mut seen = BTreeSet::new();
        for block in &self.blocks {
            for &v in &block.variables {
                if !seen.insert(v) {
                    return Err(InstanceError::DuplicateVariable(v));
                }
            }
        }
        for term in self.matrix.terms() {
            for lit in term {
                if !seen.contains(&lit.variable) {
                    return Err(InstanceError::UnquantifiedVariable(lit.variable));
                }
            }
        }
        Ok(())
    }

    /// Merges adjacent blocks with equal quantifiers and drops empty blocks.
    pub fn canonicalize(mut self) -> Self {
        let mut blocks: Vec<QuantifierBlock> = Vec::new();
        for block in self.blocks.drain(..) {
            if block.variables.is_empty() {
                continue;
            }
            match blocks.last_mut() {
                Some(last) if last.quantifier == block.quantifier => {
                    last.variables.extend(block.variables);
                }
                _ => blocks.push(block),
            }
        }
        QbfInstance {
            blocks,
            matrix: self.matrix,
        }
    }

    pub fn variables(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .flat_map(|b| b.variables.iter().copied())
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Player {
    Exists,
    Forall,
}

/// A finite-graph parity game: every node is owned by one player and carries
/// a priority; plays are infinite paths from the initial node, won by the
/// existential player iff the minimum priority seen infinitely often is even.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParityGame {
    pub nodes: Vec<String>,
    pub arcs: Vec<(usize, usize)>,
    pub initial: usize,
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
}

impl ParityGame {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.nodes.len();
        if self.owner.len() != n || self.priority.len() != n {
            return Err(InstanceError::IncompleteNodeMaps);
        }
        if self.initial >= n {
            return Err(InstanceError::NodeOutOfRange(self.initial));
        }
        for &(src, dst) in &self.arcs {
            if src >= n {
                return Err(InstanceError::NodeOutOfRange(src));
            }
            if dst >= n {
                return Err(InstanceError::NodeOutOfRange(dst));
            }
        }
        for v in 0..n {
            if !self.arcs.iter().any(|&(src, _)| src == v) {
                return Err(InstanceError::NodeWithoutArc(self.nodes[v].clone()));
            }
        }
        Ok(())
    }

    /// Distinct successors of `v`, in ascending order.
    pub fn successors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .arcs
            .iter()
            .filter(|&&(src, _)| src == v)
            .map(|&(_, dst)| dst)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A signed propositional variable used as an arc label.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct ArcLabel {
    pub variable: String,
    pub positive: bool,
}

impl ArcLabel {
    pub fn pos(variable: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            positive: true,
        }
    }

    pub fn neg(variable: impl Into<String>) -> Self {
        Self {
            variable: variable.into(),
            positive: false,
        }
    }
}

/// A directed graph with literal-labeled arcs, an initial node, and a target
/// node to be tested for being a point of no return. The restricted fragment
/// admits at most one arc per ordered node pair.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledGraph {
    pub nodes: Vec<String>,
    pub arcs: Vec<(usize, usize, ArcLabel)>,
    pub initial: usize,
    pub target: usize,
}

impl LabeledGraph {
    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.nodes.len();
        if self.initial >= n {
            return Err(InstanceError::NodeOutOfRange(self.initial));
        }
        if self.target >= n {
            return Err(InstanceError::NodeOutOfRange(self.target));
        }
        let mut seen = BTreeSet::new();
        for &(src, dst, _) in &self.arcs {
            if src >= n {
                return Err(InstanceError::NodeOutOfRange(src));
            }
            if dst >= n {
                return Err(InstanceError::NodeOutOfRange(dst));
            }
            if !seen.insert((src, dst)) {
                return Err(InstanceError::ParallelArc(
                    self.nodes[src].clone(),
                    self.nodes[dst].clone(),
                ));
            }
        }
        Ok(())
    }
}
