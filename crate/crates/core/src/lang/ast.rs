use std::fmt;

use super::term::Term;

/// Goal kinds. Only perform goals exist: the goal runs one applicable
/// plan to completion and then returns to the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum GoalKind {
    #[default]
    Perform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    BeliefAdd,
    BeliefDel,
    GoalAdd(GoalKind),
}

/// A belief or goal change. As a plan trigger the term may contain
/// variables; queued events are always ground.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub kind: EventKind,
    pub term: Term,
}

impl Event {
    pub fn belief_add(term: Term) -> Self {
        Event {
            kind: EventKind::BeliefAdd,
            term,
        }
    }

    pub fn belief_del(term: Term) -> Self {
        Event {
            kind: EventKind::BeliefDel,
            term,
        }
    }

    pub fn goal(term: Term) -> Self {
        Event {
            kind: EventKind::GoalAdd(GoalKind::Perform),
            term,
        }
    }

    pub fn is_ground(&self) -> bool {
        self.term.is_ground()
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            EventKind::BeliefAdd => write!(f, "+{}", self.term),
            EventKind::BeliefDel => write!(f, "-{}", self.term),
            EventKind::GoalAdd(_) => write!(f, "+!{}", self.term),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuardAtom {
    Believes(Term),
    True,
}

impl fmt::Display for GuardAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardAtom::Believes(t) => write!(f, ".B {t}"),
            GuardAtom::True => f.write_str("True"),
        }
    }
}

/// A conjunction of guard atoms. Never empty; `{True}` is the trivial
/// guard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guard {
    conjuncts: Vec<GuardAtom>,
}

impl Guard {
    pub fn new(conjuncts: Vec<GuardAtom>) -> Option<Self> {
        (!conjuncts.is_empty()).then_some(Guard { conjuncts })
    }

    pub fn always() -> Self {
        Guard {
            conjuncts: vec![GuardAtom::True],
        }
    }

    pub fn believes(terms: Vec<Term>) -> Self {
        assert!(!terms.is_empty());
        Guard {
            conjuncts: terms.into_iter().map(GuardAtom::Believes).collect(),
        }
    }

    pub fn conjuncts(&self) -> &[GuardAtom] {
        &self.conjuncts
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.conjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            c.fmt(f)?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Deed {
    AddBelief(Term),
    DelBelief(Term),
    AddGoal(Term, GoalKind),
    /// A call into the host engine's action handler.
    Action(Term),
}

impl fmt::Display for Deed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deed::AddBelief(t) => write!(f, "+{t}"),
            Deed::DelBelief(t) => write!(f, "-{t}"),
            Deed::AddGoal(t, _) => write!(f, "+!{t}"),
            Deed::Action(t) => write!(f, "{t}"),
        }
    }
}

/// `trigger : {guard} <- deeds;`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub trigger: Event,
    pub guard: Guard,
    pub deeds: Vec<Deed>,
    pub source_index: usize,
}
