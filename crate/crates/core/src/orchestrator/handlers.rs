//! Action handlers wiring each engine's actions to the store, the
//! continuous engine and the simulator.

use crate::agent::{ActionHandler, ActionResult};
use crate::continuous::{
    comp_distance, plan_approach_to_centre, synthesize_controller, BoundsSpec, ContinuousError, MeanMotion, Registry,
    StateVector, ThrusterStatus,
};
use crate::lang::{Substitution, Term};
use crate::store::SharedBeliefStore;

use super::{Engine, RunError, ABSTRACTION};

const ABSTRACTION_ACTIONS: &[(&str, usize)] = &[
    ("comp_distance", 7),
    ("comp_thruster_health", 9),
    ("assert_shared", 1),
    ("remove_shared", 1),
];

const REASONING_ACTIONS: &[(&str, usize)] = &[
    ("plan_approach_to_centre", 2),
    ("synthesize_controller", 3),
    ("apply_controls", 1),
    ("maintain_path", 0),
    ("use_controller", 1),
];

/// Whether `engine` (or either engine, for `None`) provides `name/arity`.
pub fn engine_knows(engine: Option<Engine>, name: &str, arity: usize) -> bool {
    let lists: &[&[(&str, usize)]] = match engine {
        Some(Engine::Abstraction) => &[ABSTRACTION_ACTIONS],
        Some(Engine::Reasoning) => &[REASONING_ACTIONS],
        None => &[ABSTRACTION_ACTIONS, REASONING_ACTIONS],
    };
    lists.iter().any(|l| l.contains(&(name, arity)))
}

/// Signature-only handler for checking programs without running them.
#[derive(Debug, Clone, Copy)]
pub struct Signatures(pub Option<Engine>);

impl ActionHandler for Signatures {
    fn knows(&self, name: &str, arity: usize) -> bool {
        engine_knows(self.0, name, arity)
    }

    fn handle(&mut self, action: &Term) -> ActionResult {
        ActionResult::Failure(format!("{action} cannot run in a signature check"))
    }
}

/// Binds `out` to `value`, or checks that it already equals it.
fn output(out: &Term, value: Term) -> ActionResult {
    output_many(&[(out, value)])
}

fn output_many(pairs: &[(&Term, Term)]) -> ActionResult {
    let mut s = Substitution::new();
    for (out, value) in pairs {
        match out {
            Term::Var(v) => {
                if !s.bind(v.clone(), value.clone()) {
                    return ActionResult::Failure(format!("conflicting outputs for {v}"));
                }
            }
            _ if *out == value => {}
            other => return ActionResult::Failure(format!("{other} does not match result {value}")),
        }
    }
    ActionResult::Bindings(s)
}

fn numbers(args: &[Term]) -> Option<Vec<f64>> {
    args.iter().map(Term::as_number).collect()
}

fn state_from(args: &[Term]) -> Option<StateVector> {
    let xs = numbers(args)?;
    let a: [f64; 6] = xs.try_into().ok()?;
    Some(StateVector::from_array(a))
}

/// Index of the weakest thruster (lowest index on ties).
pub(crate) fn weakest(health: &[f64; 6]) -> (usize, f64) {
    health
        .iter()
        .copied()
        .enumerate()
        .fold((0, health[0]), |best, (i, h)| if h < best.1 { (i, h) } else { best })
}

/// Actions of the abstraction engine: `comp_distance/7`,
/// `comp_thruster_health/9`, `assert_shared/1`, `remove_shared/1`.
pub struct AbstractionHandler<'a> {
    pub store: &'a mut SharedBeliefStore,
    pub bounds: BoundsSpec,
}

impl ActionHandler for AbstractionHandler<'_> {
    fn knows(&self, name: &str, arity: usize) -> bool {
        engine_knows(Some(Engine::Abstraction), name, arity)
    }

    fn handle(&mut self, action: &Term) -> ActionResult {
        let args = action.args();
        match (action.functor().unwrap_or_default(), args.len()) {
            ("comp_distance", 7) => {
                let Some(s) = state_from(&args[..6]) else {
                    return ActionResult::Failure(format!("{action}: expected six numbers"));
                };
                match comp_distance(&s, &self.bounds) {
                    Ok(p) => output(&args[6], Term::atom(p.as_str())),
                    Err(e) => ActionResult::Failure(e.to_string()),
                }
            }
            ("comp_thruster_health", 9) => {
                let Some(h) = numbers(&args[..6]) else {
                    return ActionResult::Failure(format!("{action}: expected six numbers"));
                };
                let health: [f64; 6] = h.try_into().expect("six values");
                let (i, worst) = weakest(&health);
                let status = if worst < 1.0 { "degraded" } else { "nominal" };
                output_many(&[
                    (&args[6], Term::atom(status)),
                    (&args[7], Term::num(i as f64)),
                    (&args[8], Term::num(worst)),
                ])
            }
            ("assert_shared", 1) => match self.store.assert_shared(ABSTRACTION, args[0].clone()) {
                Ok(_) => ActionResult::Done,
                Err(e) => ActionResult::Failure(e.to_string()),
            },
            ("remove_shared", 1) => match self.store.remove_shared(ABSTRACTION, &args[0]) {
                Ok(_) => ActionResult::Done,
                Err(e) => ActionResult::Failure(e.to_string()),
            },
            _ => ActionResult::Failure(format!("unknown action {action}")),
        }
    }
}

/// A simulator command queued by the reasoning engine, applied at the
/// start of the next tick.
#[derive(Debug, Clone, PartialEq)]
pub enum SimCommand {
    ApplyControls(String),
    MaintainPath,
    UseController(String),
}

impl std::fmt::Display for SimCommand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimCommand::ApplyControls(p) => write!(f, "apply_controls({p})"),
            SimCommand::MaintainPath => f.write_str("maintain_path"),
            SimCommand::UseController(c) => write!(f, "use_controller({c})"),
        }
    }
}

/// Actions of the reasoning engine: `plan_approach_to_centre/2`,
/// `synthesize_controller/3`, and the deferred simulator commands
/// `apply_controls/1`, `maintain_path/0`, `use_controller/1`.
pub struct ReasoningHandler<'a> {
    pub registry: &'a mut Registry,
    pub n: MeanMotion,
    pub horizon: f64,
    pub target_settle: f64,
    /// The reasoning side's model of thruster health, updated from
    /// shared `degraded_thruster` beliefs via `synthesize_controller`.
    pub thrusters: &'a mut ThrusterStatus,
    pub commands: Vec<SimCommand>,
    pub synthesized: Vec<String>,
    /// Set when an action hits an error that must stop the run.
    pub fatal: Option<RunError>,
}

impl ActionHandler for ReasoningHandler<'_> {
    fn knows(&self, name: &str, arity: usize) -> bool {
        engine_knows(Some(Engine::Reasoning), name, arity)
    }

    fn handle(&mut self, action: &Term) -> ActionResult {
        let args = action.args();
        match (action.functor().unwrap_or_default(), args.len()) {
            ("plan_approach_to_centre", 2) => {
                let Some(s) = state_from(args[1].args()).filter(|_| args[1].functor() == Some("locn")) else {
                    return ActionResult::Failure(format!("{action}: expected locn/6 of numbers"));
                };
                match plan_approach_to_centre(&s, self.n, self.horizon, self.registry) {
                    Ok(id) => output(&args[0], Term::atom(id)),
                    Err(e) => ActionResult::Failure(e.to_string()),
                }
            }
            ("synthesize_controller", 3) => {
                let (Some(i), Some(h)) = (args[1].as_number(), args[2].as_number()) else {
                    return ActionResult::Failure(format!("{action}: expected thruster index and health"));
                };
                if i.fract() != 0.0 || !(0.0..6.0).contains(&i) {
                    return ActionResult::Failure(format!("{action}: bad thruster index"));
                }
                if let Err(e) = self.thrusters.set_health(i as usize, h) {
                    return ActionResult::Failure(e.to_string());
                }
                match synthesize_controller(self.thrusters, self.target_settle, self.registry) {
                    Ok(id) => {
                        self.synthesized.push(id.clone());
                        output(&args[0], Term::atom(id))
                    }
                    Err(e @ ContinuousError::UncontrollableAxis(_)) => {
                        self.fatal = Some(RunError::UncontrollableAxis(e.to_string()));
                        ActionResult::Failure(e.to_string())
                    }
                    Err(e) => ActionResult::Failure(e.to_string()),
                }
            }
            ("apply_controls", 1) => {
                let Some(id) = args[0].as_constant() else {
                    return ActionResult::Failure(format!("{action}: expected a plan id"));
                };
                if self.registry.plan(id).is_none() {
                    self.fatal = Some(RunError::UnknownPlan(id.to_string()));
                    return ActionResult::Failure(format!("unknown maneuver plan {id}"));
                }
                self.commands.push(SimCommand::ApplyControls(id.to_string()));
                ActionResult::Done
            }
            ("maintain_path", 0) => {
                self.commands.push(SimCommand::MaintainPath);
                ActionResult::Done
            }
            ("use_controller", 1) => {
                let Some(id) = args[0].as_constant().filter(|id| self.registry.controller(id).is_some()) else {
                    return ActionResult::Failure(format!("{action}: unknown controller"));
                };
                self.commands.push(SimCommand::UseController(id.to_string()));
                ActionResult::Done
            }
            _ => ActionResult::Failure(format!("unknown action {action}")),
        }
    }
}
