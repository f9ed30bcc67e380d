//! Strategies and property checks shared by the property suites and the
//! acceptance harness.

#![allow(dead_code)]

pub mod numerics;

use std::collections::{BTreeMap, BTreeSet};

use hybridsat::agent::{bind_actions, ActionHandler, ActionResult, AgentState, NoActions};
use hybridsat::lang::{
    apply_subst, parse_program, pretty_print, unify, Deed, Event, EventKind, GoalKind, Guard, GuardAtom, Plan,
    Substitution, Term,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 256;

// ---- terms ----------------------------------------------------------

const NAMES: &[&str] = &["a", "b", "c", "p", "q", "stateinfo", "locn", "in", "out"];
const VARS: &[&str] = &["X", "Y", "Z", "L1", "_G", "Val"];

pub fn number() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1000i32..1000).prop_map(f64::from),
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        (-1e6f64..1e6),
    ]
}

pub fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES).prop_map(str::to_string)
}

pub fn var_name() -> impl Strategy<Value = String> {
    prop::sample::select(VARS).prop_map(str::to_string)
}

pub fn ground_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![number().prop_map(Term::num), name().prop_map(Term::atom)];
    leaf.prop_recursive(3, 16, 4, |inner| {
        (name(), prop::collection::vec(inner, 1..4)).prop_map(|(f, args)| Term::compound(f, args))
    })
}

/// A term that may contain variables.
pub fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        number().prop_map(Term::num),
        name().prop_map(Term::atom),
        var_name().prop_map(Term::var),
    ];
    leaf.prop_recursive(3, 16, 4, |inner| {
        (name(), prop::collection::vec(inner, 1..4)).prop_map(|(f, args)| Term::compound(f, args))
    })
}

/// A compound or constant (the shape allowed for beliefs and goals).
pub fn atom_shaped(t: impl Strategy<Value = Term> + Clone) -> impl Strategy<Value = Term> {
    (name(), prop::collection::vec(t, 0..4)).prop_map(|(f, args)| Term::compound(f, args))
}

/// Replaces random subterms of a ground term by fresh variables.
pub fn generalize(g: &Term, mask: &mut impl Iterator<Item = bool>, next: &mut usize) -> Term {
    if mask.next().unwrap_or(false) {
        *next += 1;
        return Term::var(format!("V{next}"));
    }
    match g {
        Term::Compound { functor, args } => Term::compound(
            functor.clone(),
            args.iter().map(|a| generalize(a, mask, next)).collect(),
        ),
        other => other.clone(),
    }
}

/// Reference matcher, written independently of the library.
pub fn oracle_match(p: &Term, g: &Term, s: &mut BTreeMap<String, Term>) -> bool {
    match (p, g) {
        (Term::Var(v), _) => match s.get(v) {
            Some(bound) => bound == g,
            None => {
                s.insert(v.clone(), g.clone());
                true
            }
        },
        (Term::Num(a), Term::Num(b)) => a == b,
        (Term::Compound { functor: f, args: a }, Term::Compound { functor: h, args: b }) => {
            f == h && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| oracle_match(x, y, s))
        }
        _ => false,
    }
}

// ---- programs -------------------------------------------------------

/// Terms over the given variables (or none) and constants.
fn term_over(vars: Vec<String>) -> BoxedStrategy<Term> {
    let leaf = if vars.is_empty() {
        prop_oneof![number().prop_map(Term::num), name().prop_map(Term::atom)].boxed()
    } else {
        prop_oneof![
            number().prop_map(Term::num),
            name().prop_map(Term::atom),
            prop::sample::select(vars).prop_map(Term::var),
        ]
        .boxed()
    };
    leaf.prop_recursive(2, 8, 3, |inner| {
        (name(), prop::collection::vec(inner, 1..3)).prop_map(|(f, args)| Term::compound(f, args))
    })
    .boxed()
}

fn event_kind() -> impl Strategy<Value = EventKind> {
    prop_oneof![
        Just(EventKind::BeliefAdd),
        Just(EventKind::BeliefDel),
        Just(EventKind::GoalAdd(GoalKind::Perform)),
    ]
}

/// One plan satisfying the binding rule: belief and goal additions only
/// use variables bound by the trigger or the guard.
pub fn plan() -> impl Strategy<Value = Plan> {
    (event_kind(), atom_shaped(term_over(VARS.iter().map(|v| v.to_string()).collect())))
        .prop_flat_map(|(kind, trigger)| {
            let bound: Vec<String> = trigger.vars().into_iter().collect();
            let all: Vec<String> = VARS.iter().map(|v| v.to_string()).collect();
            let guard = prop_oneof![
                Just(Guard::always()),
                prop::collection::vec(atom_shaped(term_over(all.clone())), 1..3).prop_map(Guard::believes),
            ];
            (Just(kind), Just(trigger), guard, Just(bound), Just(all))
        })
        .prop_flat_map(|(kind, trigger, guard, mut bound, all)| {
            for a in guard.conjuncts() {
                if let GuardAtom::Believes(t) = a {
                    bound.extend(t.vars());
                }
            }
            bound.sort();
            bound.dedup();
            let safe = atom_shaped(term_over(bound)).boxed();
            let deed = prop_oneof![
                safe.clone().prop_map(Deed::AddBelief),
                atom_shaped(term_over(all.clone())).prop_map(Deed::DelBelief),
                safe.prop_map(|t| Deed::AddGoal(t, GoalKind::Perform)),
                atom_shaped(term_over(vec!["Out".into()])).prop_map(Deed::Action),
            ];
            (
                Just(Event { kind, term: trigger }),
                Just(guard),
                prop::collection::vec(deed, 1..5),
            )
        })
        .prop_map(|(trigger, guard, deeds)| Plan {
            trigger,
            guard,
            deeds,
            source_index: 0,
        })
}

pub fn program() -> impl Strategy<Value = Vec<Plan>> {
    prop::collection::vec(plan(), 0..6).prop_map(|mut plans| {
        for (i, p) in plans.iter_mut().enumerate() {
            p.source_index = i;
        }
        plans
    })
}

/// Knows every action and binds each variable it is given to `out`.
pub struct BindAll;

impl ActionHandler for BindAll {
    fn knows(&self, _: &str, _: usize) -> bool {
        true
    }

    fn handle(&mut self, action: &Term) -> ActionResult {
        let mut s = Substitution::new();
        for v in action.vars() {
            s.bind(v, Term::atom("out"));
        }
        ActionResult::Bindings(s)
    }
}

/// Replaces every variable by the given constant.
pub fn ground_with(t: &Term, c: &Term) -> Term {
    let s: Substitution = t.vars().into_iter().map(|v| (v, c.clone())).collect();
    apply_subst(t, &s)
}

// ---- property checks ------------------------------------------------

pub fn check_round_trip(plans: Vec<Plan>) -> Result<(), TestCaseError> {
    let text = pretty_print(&plans);
    let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&back, &plans, "{}", text);
    prop_assert_eq!(pretty_print(&back), text);
    Ok(())
}

pub fn check_unify_sound((p, g): (Term, Term)) -> Result<(), TestCaseError> {
    let mut oracle = BTreeMap::new();
    let expected = oracle_match(&p, &g, &mut oracle);
    match unify(&p, &g) {
        Some(s) => {
            prop_assert!(expected, "unified {} with {} but the oracle disagrees", p, g);
            prop_assert_eq!(apply_subst(&p, &s), g.clone());
            let bound: BTreeSet<String> = s.iter().map(|(k, _)| k.clone()).collect();
            prop_assert_eq!(bound, p.vars());
            for (k, v) in s.iter() {
                prop_assert_eq!(Some(v), oracle.get(k));
            }
        }
        None => prop_assert!(!expected, "{} should match {}", p, g),
    }
    Ok(())
}

pub fn check_unify_generalized((g, mask): (Term, Vec<bool>)) -> Result<(), TestCaseError> {
    let mut next = 0;
    let p = generalize(&g, &mut mask.into_iter(), &mut next);
    let s = unify(&p, &g).ok_or_else(|| TestCaseError::fail(format!("{p} does not match {g}")))?;
    prop_assert_eq!(apply_subst(&p, &s), g);
    Ok(())
}

/// Trigger argument: `None` is a variable, `Some(k)` the constant `ck`.
pub type OrderCase = (Vec<(Option<u8>, Option<u8>)>, BTreeSet<u8>, u8);

pub fn order_case() -> impl Strategy<Value = OrderCase> {
    (
        prop::collection::vec((prop::option::of(0u8..3), prop::option::of(0u8..3)), 1..8),
        prop::collection::btree_set(0u8..3, 0..3),
        0u8..3,
    )
}

/// Plans `+p(A) : {G} <- +done(i)`; the selected plan must be the first
/// whose trigger matches and whose guard holds.
pub fn check_source_order((plans, beliefs, event): OrderCase) -> Result<(), TestCaseError> {
    let c = |k: u8| Term::atom(format!("c{k}"));
    let lib: Vec<Plan> = plans
        .iter()
        .enumerate()
        .map(|(i, (arg, guard))| Plan {
            trigger: Event::belief_add(Term::compound("p", vec![arg.map_or(Term::var("A"), c)])),
            guard: guard.map_or(Guard::always(), |g| Guard::believes(vec![Term::compound("q", vec![c(g)])])),
            deeds: vec![Deed::AddBelief(Term::compound("done", vec![Term::num(i as f64)]))],
            source_index: i,
        })
        .collect();
    let mut agent = AgentState::new("t", bind_actions(lib, &NoActions).unwrap());
    for b in &beliefs {
        agent.deliver(Event::belief_add(Term::compound("q", vec![c(*b)]))).unwrap();
    }
    let expected = plans
        .iter()
        .position(|(arg, guard)| arg.is_none_or(|a| a == event) && guard.is_none_or(|g| beliefs.contains(&g)));
    let ev = Event::belief_add(Term::compound("p", vec![c(event)]));
    prop_assert_eq!(agent.select_plan(&ev).map(|(i, _)| i), expected);
    Ok(())
}

/// A plan body of belief additions and deletions over a few atoms.
pub fn coupling_case() -> impl Strategy<Value = (Vec<(bool, u8)>, BTreeSet<u8>)> {
    (
        prop::collection::vec((any::<bool>(), 0u8..4), 1..12),
        prop::collection::btree_set(0u8..4, 0..4),
    )
}

pub fn check_coupling((ops, initial): (Vec<(bool, u8)>, BTreeSet<u8>)) -> Result<(), TestCaseError> {
    let b = |k: u8| Term::compound("b", vec![Term::num(f64::from(k))]);
    let deeds = ops
        .iter()
        .map(|&(add, k)| if add { Deed::AddBelief(b(k)) } else { Deed::DelBelief(b(k)) })
        .collect();
    let plan = Plan {
        trigger: Event::goal(Term::atom("go")),
        guard: Guard::always(),
        deeds,
        source_index: 0,
    };
    let mut agent = AgentState::new("t", bind_actions(vec![plan], &NoActions).unwrap());
    let mut model = initial.clone();
    for k in &initial {
        agent.deliver(Event::belief_add(b(*k))).unwrap();
    }
    while agent.events().front().is_some() {
        agent.step(&mut NoActions);
    }
    agent.post_event(Event::goal(Term::atom("go"))).unwrap();
    agent.step(&mut NoActions).unwrap();

    let mut expected_events = Vec::new();
    for &(add, k) in &ops {
        if add {
            model.insert(k);
            expected_events.push(Event::belief_add(b(k)));
        } else if model.remove(&k) {
            expected_events.push(Event::belief_del(b(k)));
        }
    }
    let beliefs: BTreeSet<String> = agent.beliefs().iter().map(Term::to_string).collect();
    let expected: BTreeSet<String> = model.iter().map(|k| b(*k).to_string()).collect();
    prop_assert_eq!(beliefs, expected);
    let queued: Vec<Event> = agent.events().iter().cloned().collect();
    prop_assert_eq!(queued, expected_events);
    Ok(())
}

/// Runs a random program on events obtained by grounding its own
/// triggers; beliefs and queued events must stay ground throughout.
pub fn groundness_case() -> impl Strategy<Value = (Vec<Plan>, Vec<(usize, Term)>)> {
    (program(), prop::collection::vec((0usize..8, ground_term()), 1..6))
}

pub fn check_groundness((plans, picks): (Vec<Plan>, Vec<(usize, Term)>)) -> Result<(), TestCaseError> {
    let triggers: Vec<Event> = plans.iter().map(|p| p.trigger.clone()).collect();
    let mut agent = AgentState::new("t", bind_actions(plans, &BindAll).unwrap());
    for (i, filler) in picks {
        let Some(trig) = (!triggers.is_empty()).then(|| &triggers[i % triggers.len()]) else {
            break;
        };
        let ev = Event {
            kind: trig.kind,
            term: ground_with(&trig.term, &filler),
        };
        agent.post_event(ev).unwrap();
        for _ in 0..50 {
            let Some(rec) = agent.step(&mut BindAll) else { break };
            prop_assert!(agent.beliefs().iter().all(Term::is_ground));
            prop_assert!(agent.events().iter().all(Event::is_ground));
            prop_assert!(!rec.event.is_empty());
        }
    }
    Ok(())
}

// ---- runner ---------------------------------------------------------

/// Runs `cases` random cases of a property and reports the first failure.
pub fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub type Suite = (&'static str, fn(u32) -> Result<(), String>);

pub fn interpreter_suites() -> Vec<Suite> {
    vec![
        ("source-order plan selection", |n| run(n, order_case(), check_source_order)),
        ("belief/event coupling", |n| run(n, coupling_case(), check_coupling)),
        ("groundness", |n| run(n, groundness_case(), check_groundness)),
        ("unification soundness", |n| {
            run(n, (term(), ground_term()), check_unify_sound)?;
            run(n, (ground_term(), prop::collection::vec(prop::bool::weighted(0.3), 0..32)), check_unify_generalized)
        }),
        ("parser round-trip", |n| run(n, program(), check_round_trip)),
    ]
}
