//! Shared beliefs between the abstraction and reasoning engines.
//!
//! Only the registered writer may mutate the store. Every effective
//! mutation is queued as an event for each subscriber, in mutation order.

use std::collections::{BTreeMap, VecDeque};

use log::warn;
use thiserror::Error;

use crate::agent::BeliefBase;
use crate::lang::{Event, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("{0} is not the writer of the shared store")]
    NotWriter(String),
    #[error("shared belief {0} is not ground")]
    NonGround(String),
    #[error("unknown subscriber {0}")]
    UnknownSubscriber(String),
}

#[derive(Debug, Clone)]
pub struct SharedBeliefStore {
    writer: String,
    atoms: BeliefBase,
    pending: BTreeMap<String, VecDeque<Event>>,
    order: Vec<String>,
}

impl SharedBeliefStore {
    pub fn new(writer: impl Into<String>) -> Self {
        SharedBeliefStore {
            writer: writer.into(),
            atoms: BeliefBase::new(),
            pending: BTreeMap::new(),
            order: Vec::new(),
        }
    }

    /// Seeds atoms without generating events. Subscribers registered
    /// afterwards are assumed to already hold these beliefs.
    pub fn with_atoms(mut self, atoms: impl IntoIterator<Item = Term>) -> Self {
        for a in atoms {
            self.atoms.insert(a);
        }
        self
    }

    pub fn subscribe(&mut self, name: impl Into<String>) {
        let name = name.into();
        if !self.pending.contains_key(&name) {
            self.order.push(name.clone());
            self.pending.insert(name, VecDeque::new());
        }
    }

    pub fn subscribers(&self) -> &[String] {
        &self.order
    }

    pub fn writer(&self) -> &str {
        &self.writer
    }

    pub fn atoms(&self) -> &BeliefBase {
        &self.atoms
    }

    /// Sorted canonical atom strings.
    pub fn dump(&self) -> Vec<String> {
        self.atoms.dump()
    }

    fn check_writer(&self, writer: &str) -> Result<(), StoreError> {
        if writer == self.writer {
            Ok(())
        } else {
            Err(StoreError::NotWriter(writer.to_string()))
        }
    }

    fn publish(&mut self, event: Event) {
        for q in self.pending.values_mut() {
            q.push_back(event.clone());
        }
    }

    /// Inserts a ground atom. Returns whether it was new; re-asserting an
    /// existing atom generates no event.
    pub fn assert_shared(&mut self, writer: &str, atom: Term) -> Result<bool, StoreError> {
        self.check_writer(writer)?;
        if !atom.is_ground() {
            return Err(StoreError::NonGround(atom.to_string()));
        }
        let fresh = self.atoms.insert(atom.clone());
        if fresh {
            self.publish(Event::belief_add(atom));
        }
        Ok(fresh)
    }

    /// Removes every atom matching `pattern`, returning them in canonical
    /// order.
    pub fn remove_shared(&mut self, writer: &str, pattern: &Term) -> Result<Vec<Term>, StoreError> {
        self.check_writer(writer)?;
        if matches!(pattern, Term::Var(_)) {
            warn!("remove_shared with bare variable pattern {pattern} clears the store");
        }
        let removed = self.atoms.remove_matching(pattern);
        for a in &removed {
            self.publish(Event::belief_del(a.clone()));
        }
        Ok(removed)
    }

    pub fn drain(&mut self, subscriber: &str) -> Result<Vec<Event>, StoreError> {
        self.pending
            .get_mut(subscriber)
            .map(|q| q.drain(..).collect())
            .ok_or_else(|| StoreError::UnknownSubscriber(subscriber.to_string()))
    }
}
