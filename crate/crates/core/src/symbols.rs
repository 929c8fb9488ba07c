//! Atom identifiers and the symbol table mapping them to ground-term names.
//!
//! All programs that take part in one (combined) solving problem share a
//! single table, so atoms with equal names get equal identifiers across
//! program levels and name identity reduces to id identity. The table is an
//! append-only interner behind a cheaply clonable handle; ids, once handed
//! out, never change meaning.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

/// Names starting with this prefix denote solver-generated atoms. They are
/// excluded from vocabulary sharing between program levels and are hidden
/// from printed models.
pub const INTERNAL_PREFIX: &str = "__";

/// Dense identifier of a ground atom within one [`SymbolTable`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

#[derive(Default, Debug)]
struct Table {
    names: Vec<Arc<str>>,
    index: HashMap<Arc<str>, AtomId>,
}

/// Bijective map between atom names (ground-term renderings such as
/// `arc(v1,v2)`) and dense [`AtomId`]s. Clones share the same table.
#[derive(Clone, Default, Debug)]
pub struct SymbolTable {
    inner: Arc<RwLock<Table>>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, allocating a fresh one on first sight.
    /// Empty names are rejected; they cannot denote an atom.
    pub fn intern(&self, name: &str) -> AtomId {
        assert!(!name.is_empty(), "atom name must be non-empty");
        let mut tab = self.inner.write().unwrap();
        if let Some(&id) = tab.index.get(name) {
            return id;
        }
        let id = AtomId(u32::try_from(tab.names.len()).expect("symbol table overflow"));
        let name: Arc<str> = Arc::from(name);
        tab.names.push(name.clone());
        tab.index.insert(name, id);
        id
    }

    /// Interns a name based on `stem` that was not previously taken,
    /// appending a counter on collision with an existing atom.
    pub fn intern_fresh(&self, stem: &str) -> AtomId {
        let mut tab = self.inner.write().unwrap();
        let name: Arc<str> = if !tab.index.contains_key(stem) {
            Arc::from(stem)
        } else {
            let mut n = 0usize;
            loop {
                let candidate = format!("{stem}_{n}");
                if !tab.index.contains_key(candidate.as_str()) {
                    break Arc::from(candidate.as_str());
                }
                n += 1;
            }
        };
        let id = AtomId(u32::try_from(tab.names.len()).expect("symbol table overflow"));
        tab.names.push(name.clone());
        tab.index.insert(name, id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<AtomId> {
        self.inner.read().unwrap().index.get(name).copied()
    }

    pub fn name(&self, atom: AtomId) -> Arc<str> {
        self.inner.read().unwrap().names[atom.index()].clone()
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Solver-generated atoms carry the reserved [`INTERNAL_PREFIX`].
    pub fn is_internal(&self, atom: AtomId) -> bool {
        self.name(atom).starts_with(INTERNAL_PREFIX)
    }

    /// Whether two handles refer to the same underlying table.
    pub fn same_table(&self, other: &SymbolTable) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }
}
