//! Deliberation-cycle interpreter for plan libraries.
//!
//! One [`AgentState`] holds a belief base, a FIFO of ground events and an
//! immutable plan library. Each [`AgentState::step`] pops one event,
//! selects the first applicable plan in source order and runs its deeds
//! to completion. Perform goals run synchronously as nested calls.
//! Failures never escape a step: they are recorded in the returned
//! [`CycleRecord`] and the agent keeps running.

mod beliefs;

use std::collections::VecDeque;
use std::sync::Arc;

use log::{debug, warn};
use serde::Serialize;
use thiserror::Error;

use crate::lang::{apply_subst, unify, unify_into, Deed, Event, EventKind, Guard, GuardAtom, Plan, Substitution, Term};

pub use beliefs::BeliefBase;

/// Maximum nesting of perform goals below a top-level plan.
pub const MAX_GOAL_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum ActionResult {
    Done,
    /// Bindings for the variables left free in the action's output
    /// positions.
    Bindings(Substitution),
    Failure(String),
}

/// Host-side implementation of the actions a plan library may call.
pub trait ActionHandler {
    fn knows(&self, name: &str, arity: usize) -> bool;
    fn handle(&mut self, action: &Term) -> ActionResult;
}

impl<H: ActionHandler + ?Sized> ActionHandler for &mut H {
    fn knows(&self, name: &str, arity: usize) -> bool {
        (**self).knows(name, arity)
    }

    fn handle(&mut self, action: &Term) -> ActionResult {
        (**self).handle(action)
    }
}

/// A handler that knows no actions.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoActions;

impl ActionHandler for NoActions {
    fn knows(&self, _: &str, _: usize) -> bool {
        false
    }

    fn handle(&mut self, action: &Term) -> ActionResult {
        ActionResult::Failure(format!("unknown action {action}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAction {
    pub name: String,
    pub arity: usize,
    pub plan: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("unknown actions: {}", fmt_unknown(.0))]
    UnknownActions(Vec<UnknownAction>),
    #[error("event {0} is not ground")]
    NonGroundEvent(String),
    #[error("agent {agent}: cycle budget of {budget} exhausted")]
    BudgetExhausted { agent: String, budget: usize },
}

fn fmt_unknown(xs: &[UnknownAction]) -> String {
    xs.iter()
        .map(|u| format!("{}/{} (plan {})", u.name, u.arity, u.plan))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Plans whose actions have all been resolved against a handler.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanLibrary {
    plans: Vec<Plan>,
}

impl PlanLibrary {
    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn len(&self) -> usize {
        self.plans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plans.is_empty()
    }
}

/// Checks that every action deed names something `handler` can run.
pub fn bind_actions(plans: Vec<Plan>, handler: &dyn ActionHandler) -> Result<PlanLibrary, AgentError> {
    let unknown: Vec<UnknownAction> = plans
        .iter()
        .flat_map(|p| {
            p.deeds.iter().filter_map(move |d| match d {
                Deed::Action(t) => {
                    let name = t.functor().unwrap_or_default();
                    (!handler.knows(name, t.arity())).then(|| UnknownAction {
                        name: name.to_string(),
                        arity: t.arity(),
                        plan: p.source_index,
                    })
                }
                _ => None,
            })
        })
        .collect();
    if unknown.is_empty() {
        Ok(PlanLibrary { plans })
    } else {
        Err(AgentError::UnknownActions(unknown))
    }
}

/// Finds the first solution of `guard` over `beliefs` extending `s`.
///
/// Conjuncts are solved left to right. Candidate atoms for each
/// conjunct are tried in canonical order, backtracking into later
/// candidates only when a subsequent conjunct has no match.
pub fn guard_holds(guard: &Guard, beliefs: &BeliefBase, s: &Substitution) -> Option<Substitution> {
    solve(guard.conjuncts(), beliefs, s.clone())
}

fn solve(conjuncts: &[GuardAtom], beliefs: &BeliefBase, s: Substitution) -> Option<Substitution> {
    let Some((first, rest)) = conjuncts.split_first() else {
        return Some(s);
    };
    match first {
        GuardAtom::True => solve(rest, beliefs, s),
        GuardAtom::Believes(t) => {
            let pattern = apply_subst(t, &s);
            beliefs.iter().find_map(|atom| {
                let mut ext = s.clone();
                if unify_into(&pattern, atom, &mut ext) {
                    solve(rest, beliefs, ext)
                } else {
                    None
                }
            })
        }
    }
}

fn trigger_matches(trigger: &Event, event: &Event) -> Option<Substitution> {
    if trigger.kind != event.kind {
        return None;
    }
    unify(&trigger.term, &event.term)
}

/// One line of the agent trace.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CycleRecord {
    pub cycle: u64,
    pub agent: String,
    pub event: String,
    pub selected_plan: Option<usize>,
    pub goals: Vec<String>,
    pub actions: Vec<String>,
    pub belief_delta: Vec<String>,
    pub errors: Vec<String>,
}

#[derive(Debug)]
enum Abort {
    /// Stops the current plan instance only.
    Plan,
    /// Unwinds the whole intention.
    Intention,
}

#[derive(Debug, Clone)]
pub struct AgentState {
    name: String,
    beliefs: BeliefBase,
    events: VecDeque<Event>,
    library: Arc<PlanLibrary>,
    cycle: u64,
}

impl AgentState {
    pub fn new(name: impl Into<String>, library: PlanLibrary) -> Self {
        AgentState {
            name: name.into(),
            beliefs: BeliefBase::new(),
            events: VecDeque::new(),
            library: Arc::new(library),
            cycle: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn beliefs(&self) -> &BeliefBase {
        &self.beliefs
    }

    pub fn events(&self) -> &VecDeque<Event> {
        &self.events
    }

    pub fn library(&self) -> &PlanLibrary {
        &self.library
    }

    /// Number of events processed so far.
    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    /// Appends a ground event to the queue without touching beliefs.
    pub fn post_event(&mut self, event: Event) -> Result<(), AgentError> {
        if !event.is_ground() {
            return Err(AgentError::NonGroundEvent(event.to_string()));
        }
        self.events.push_back(event);
        Ok(())
    }

    /// Applies an externally sourced belief change (percept or shared
    /// belief) and posts the matching event.
    pub fn deliver(&mut self, event: Event) -> Result<(), AgentError> {
        if !event.is_ground() {
            return Err(AgentError::NonGroundEvent(event.to_string()));
        }
        match event.kind {
            EventKind::BeliefAdd => {
                self.beliefs.insert(event.term.clone());
            }
            EventKind::BeliefDel => {
                self.beliefs.remove(&event.term);
            }
            EventKind::GoalAdd(_) => {}
        }
        self.events.push_back(event);
        Ok(())
    }

    /// Replaces every belief with the same functor and arity as `atom`
    /// by `atom`: one deletion event per replaced atom, then one
    /// addition event.
    pub fn replace_percept(&mut self, atom: Term) -> Result<(), AgentError> {
        if !atom.is_ground() {
            return Err(AgentError::NonGroundEvent(atom.to_string()));
        }
        let name = atom.functor().unwrap_or_default().to_string();
        let pattern = Term::compound(name, (0..atom.arity()).map(|i| Term::var(format!("_P{i}"))).collect());
        for old in self.beliefs.remove_matching(&pattern) {
            self.events.push_back(Event::belief_del(old));
        }
        self.deliver(Event::belief_add(atom))
    }

    /// Lowest-index plan whose trigger matches and whose guard holds.
    pub fn select_plan(&self, event: &Event) -> Option<(usize, Substitution)> {
        self.library.plans().iter().enumerate().find_map(|(i, p)| {
            let s = trigger_matches(&p.trigger, event)?;
            guard_holds(&p.guard, &self.beliefs, &s).map(|s| (i, s))
        })
    }

    /// Runs one deliberation cycle. Returns `None` when the queue was
    /// empty.
    pub fn step(&mut self, handler: &mut dyn ActionHandler) -> Option<CycleRecord> {
        let event = self.events.pop_front()?;
        self.cycle += 1;
        let mut rec = CycleRecord {
            cycle: self.cycle,
            agent: self.name.clone(),
            event: event.to_string(),
            ..Default::default()
        };
        match self.select_plan(&event) {
            Some((idx, s)) => {
                rec.selected_plan = Some(idx);
                let _ = self.execute_deeds(idx, s, handler, 0, &mut rec);
            }
            None => debug!("{}: dropped {} (no applicable plan)", self.name, event),
        }
        for e in &rec.errors {
            warn!("{}: {}", self.name, e);
        }
        Some(rec)
    }

    /// Steps until the queue is empty. The empty step counts towards
    /// `budget`.
    pub fn run_to_quiescence(
        &mut self,
        handler: &mut dyn ActionHandler,
        budget: usize,
    ) -> Result<Vec<CycleRecord>, AgentError> {
        assert!(budget >= 1, "cycle budget must be at least 1");
        let mut records = Vec::new();
        for _ in 0..budget {
            match self.step(handler) {
                Some(r) => records.push(r),
                None => return Ok(records),
            }
        }
        Err(AgentError::BudgetExhausted {
            agent: self.name.clone(),
            budget,
        })
    }

    fn execute_deeds(
        &mut self,
        plan_idx: usize,
        mut s: Substitution,
        handler: &mut dyn ActionHandler,
        depth: usize,
        rec: &mut CycleRecord,
    ) -> Result<(), Abort> {
        let library = Arc::clone(&self.library);
        let plan = &library.plans()[plan_idx];
        for deed in &plan.deeds {
            match self.execute_deed(deed, &mut s, handler, depth, rec) {
                Ok(()) => {}
                Err(Abort::Plan) => return Ok(()),
                Err(Abort::Intention) => return Err(Abort::Intention),
            }
        }
        Ok(())
    }

    fn execute_deed(
        &mut self,
        deed: &Deed,
        s: &mut Substitution,
        handler: &mut dyn ActionHandler,
        depth: usize,
        rec: &mut CycleRecord,
    ) -> Result<(), Abort> {
        match deed {
            Deed::AddBelief(t) => {
                let atom = apply_subst(t, s);
                if !atom.is_ground() {
                    rec.errors.push(format!("belief {atom} is not ground"));
                    return Err(Abort::Plan);
                }
                rec.belief_delta.push(format!("+{atom}"));
                self.beliefs.insert(atom.clone());
                self.events.push_back(Event::belief_add(atom));
            }
            Deed::DelBelief(t) => {
                let pattern = apply_subst(t, s);
                for atom in self.beliefs.remove_matching(&pattern) {
                    rec.belief_delta.push(format!("-{atom}"));
                    self.events.push_back(Event::belief_del(atom));
                }
            }
            Deed::AddGoal(t, _) => {
                let goal = Event::goal(apply_subst(t, s));
                if !goal.is_ground() {
                    rec.errors.push(format!("goal {goal} is not ground"));
                    return Err(Abort::Plan);
                }
                if depth + 1 > MAX_GOAL_DEPTH {
                    rec.errors
                        .push(format!("goal {goal} exceeds nesting depth {MAX_GOAL_DEPTH}"));
                    return Err(Abort::Intention);
                }
                match self.select_plan(&goal) {
                    Some((idx, gs)) => {
                        rec.goals.push(format!("{goal} -> {idx}"));
                        self.execute_deeds(idx, gs, handler, depth + 1, rec)?;
                    }
                    None => {
                        rec.goals.push(goal.to_string());
                        rec.errors.push(format!("no applicable plan for goal {goal}"));
                        return Err(Abort::Plan);
                    }
                }
            }
            Deed::Action(t) => {
                let action = apply_subst(t, s);
                match handler.handle(&action) {
                    ActionResult::Done => rec.actions.push(action.to_string()),
                    ActionResult::Bindings(b) => {
                        let free = action.vars();
                        let stray = b.iter().any(|(k, _)| !free.contains(k));
                        if stray || !s.merge(&b) {
                            rec.actions.push(action.to_string());
                            rec.errors.push(format!("action {action} returned invalid bindings {b}"));
                            return Err(Abort::Plan);
                        }
                        rec.actions.push(apply_subst(&action, &b).to_string());
                    }
                    ActionResult::Failure(reason) => {
                        rec.actions.push(action.to_string());
                        rec.errors.push(format!("action {action} failed: {reason}"));
                        return Err(Abort::Plan);
                    }
                }
            }
        }
        Ok(())
    }
}
