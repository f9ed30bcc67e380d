use std::collections::BTreeMap;

use crate::lang::{unify, Term};

/// A set of ground atoms, ordered by canonical printed form.
///
/// The ordering is what guard evaluation uses to pick among several
/// matching atoms, so it must not depend on insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BeliefBase {
    atoms: BTreeMap<String, Term>,
}

impl BeliefBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a ground atom; returns whether it was new.
    ///
    /// # Panics
    /// If `atom` is not ground.
    pub fn insert(&mut self, atom: Term) -> bool {
        assert!(atom.is_ground(), "belief {atom} is not ground");
        self.atoms.insert(atom.to_string(), atom).is_none()
    }

    pub fn remove(&mut self, atom: &Term) -> bool {
        self.atoms.remove(&atom.to_string()).is_some()
    }

    pub fn contains(&self, atom: &Term) -> bool {
        self.atoms.contains_key(&atom.to_string())
    }

    /// Removes every atom that `pattern` matches, in canonical order.
    pub fn remove_matching(&mut self, pattern: &Term) -> Vec<Term> {
        let keys: Vec<String> = self
            .atoms
            .iter()
            .filter(|(_, a)| unify(pattern, a).is_some())
            .map(|(k, _)| k.clone())
            .collect();
        keys.into_iter().filter_map(|k| self.atoms.remove(&k)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.atoms.values()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Canonical strings in order.
    pub fn dump(&self) -> Vec<String> {
        self.atoms.keys().cloned().collect()
    }
}

impl FromIterator<Term> for BeliefBase {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        let mut b = BeliefBase::new();
        for t in iter {
            b.insert(t);
        }
        b
    }
}
