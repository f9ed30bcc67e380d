//! Scenario-driven co-simulation of the two engines, the shared store,
//! the continuous engine and the simulator, plus trace output and
//! replay.
//!
//! Each tick runs, in order: pending simulator commands from the previous
//! tick; one simulator step; percept delivery to the abstraction engine;
//! abstraction deliberation to quiescence; store events drained into the
//! reasoning engine; reasoning deliberation to quiescence.

mod config;
mod handlers;
mod trace;

use std::fmt;

use thiserror::Error;

use crate::agent::{bind_actions, AgentError, AgentState, CycleRecord};
use crate::continuous::{synthesize_controller, Registry, ThrusterStatus};
use crate::lang::{parse_program, Event};
use crate::sim::{SimError, SimState};
use crate::store::SharedBeliefStore;

pub use config::{ProgramSource, ScenarioConfig, DEFAULT_CYCLE_BUDGET, DEFAULT_TARGET_SETTLE};
pub use handlers::{engine_knows, AbstractionHandler, ReasoningHandler, Signatures, SimCommand};
pub use trace::{plot_series, replay, ReplayOutcome, TickRecord, TraceHeader, TraceLog};

/// Agent and store-writer name of the abstraction engine.
pub const ABSTRACTION: &str = "abstraction";
/// Agent and store-subscriber name of the reasoning engine.
pub const REASONING: &str = "reasoning";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Abstraction,
    Reasoning,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Abstraction => ABSTRACTION,
            Engine::Reasoning => REASONING,
        })
    }
}

/// Errors that stop a run. Each maps to a distinct process exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{engine} program: {message}")]
    Program { engine: Engine, message: String },
    #[error("{0}")]
    BudgetExhausted(String),
    #[error("unknown maneuver plan {0}")]
    UnknownPlan(String),
    #[error("{0}")]
    UncontrollableAxis(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Program { .. } => 3,
            RunError::BudgetExhausted(_) => 4,
            RunError::UnknownPlan(_) => 5,
            RunError::UncontrollableAxis(_) => 6,
            RunError::Io(_) => 7,
        }
    }
}

impl From<AgentError> for RunError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::BudgetExhausted { .. } => RunError::BudgetExhausted(e.to_string()),
            other => RunError::Config(other.to_string()),
        }
    }
}

fn load_agent(engine: Engine, source: &ProgramSource) -> Result<AgentState, RunError> {
    let program_err = |message: String| RunError::Program { engine, message };
    let plans = parse_program(&source.text).map_err(|e| program_err(format!("{}: {e}", source.path.display())))?;
    let library = bind_actions(plans, &Signatures(Some(engine))).map_err(|e| program_err(e.to_string()))?;
    Ok(AgentState::new(engine.to_string(), library))
}

/// Result of [`run_scenario`]: the trace up to the point the run stopped
/// and the error that stopped it, if any.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trace: TraceLog,
    pub error: Option<RunError>,
}

struct Runner<'c> {
    cfg: &'c ScenarioConfig,
    sim: SimState,
    registry: Registry,
    store: SharedBeliefStore,
    abstraction: AgentState,
    reasoning: AgentState,
    reasoning_thrusters: ThrusterStatus,
    pending: Vec<SimCommand>,
}

impl Runner<'_> {
    /// Runs abstraction, store hand-off and reasoning; fills the agent
    /// parts of `rec`.
    fn deliberate(&mut self, rec: &mut TickRecord) -> Result<(), RunError> {
        let mut abs = AbstractionHandler {
            store: &mut self.store,
            bounds: self.cfg.sim.bounds,
        };
        let result = self.abstraction.run_to_quiescence(&mut abs, self.cfg.cycle_budget);
        rec.abstraction = collect(result)?;

        for ev in self.store.drain(REASONING).expect("reasoning is subscribed") {
            self.reasoning.deliver(ev)?;
        }

        let mut reas = ReasoningHandler {
            registry: &mut self.registry,
            n: self.cfg.sim.n,
            horizon: self.cfg.horizon,
            target_settle: self.cfg.target_settle,
            thrusters: &mut self.reasoning_thrusters,
            commands: Vec::new(),
            synthesized: Vec::new(),
            fatal: None,
        };
        let result = self.reasoning.run_to_quiescence(&mut reas, self.cfg.cycle_budget);
        let (commands, fatal) = (reas.commands, reas.fatal);
        rec.reasoning = collect(result)?;
        if let Some(e) = fatal {
            return Err(e);
        }
        self.pending = commands;
        rec.store = self.store.dump();
        Ok(())
    }

    fn apply_pending(&mut self, rec: &mut TickRecord) -> Result<(), RunError> {
        for cmd in std::mem::take(&mut self.pending) {
            rec.applied.push(cmd.to_string());
            let r = match &cmd {
                SimCommand::ApplyControls(id) => self.sim.apply_controls(&self.cfg.sim, &self.registry, id),
                SimCommand::MaintainPath => {
                    self.sim.maintain_path();
                    Ok(())
                }
                SimCommand::UseController(id) => self.sim.use_controller(&self.registry, id),
            };
            match r {
                Ok(()) => {}
                Err(SimError::UnknownPlan(id)) => return Err(RunError::UnknownPlan(id)),
                Err(e) => return Err(RunError::Config(e.to_string())),
            }
        }
        Ok(())
    }
}

fn collect(result: Result<Vec<CycleRecord>, AgentError>) -> Result<Vec<CycleRecord>, RunError> {
    result.map_err(RunError::from)
}

/// Runs a scenario to completion or to the first fatal error.
pub fn run_scenario(cfg: &ScenarioConfig) -> RunOutcome {
    let mut trace = TraceLog::new(TraceHeader::from_config(cfg));
    let error = run_into(cfg, &mut trace).err();
    if let Some(e) = &error {
        trace.error = Some(e.to_string());
    }
    RunOutcome { trace, error }
}

fn run_into(cfg: &ScenarioConfig, trace: &mut TraceLog) -> Result<(), RunError> {
    let ticks = cfg.sim.ticks().map_err(|e| RunError::Config(e.to_string()))?;
    let mut abstraction = load_agent(Engine::Abstraction, &cfg.abstraction_program)?;
    let mut reasoning = load_agent(Engine::Reasoning, &cfg.reasoning_program)?;

    let nominal = ThrusterStatus::nominal(cfg.sim.max_accel).map_err(|e| RunError::Config(e.to_string()))?;
    let mut registry = Registry::new();
    let ctrl = synthesize_controller(&nominal, cfg.target_settle, &mut registry)
        .map_err(|e| RunError::UncontrollableAxis(e.to_string()))?;
    let controller = registry.controller(&ctrl).expect("just registered").clone();
    let sim = SimState::new(&cfg.sim, controller).map_err(|e| RunError::Config(e.to_string()))?;

    let mut store = SharedBeliefStore::new(ABSTRACTION).with_atoms(cfg.store_beliefs.iter().cloned());
    store.subscribe(REASONING);
    for b in &cfg.abstraction_beliefs {
        abstraction.deliver(Event::belief_add(b.clone()))?;
    }
    for b in &cfg.reasoning_beliefs {
        reasoning.deliver(Event::belief_add(b.clone()))?;
    }

    let mut runner = Runner {
        cfg,
        sim,
        registry,
        store,
        abstraction,
        reasoning,
        reasoning_thrusters: nominal,
        pending: Vec::new(),
    };

    let result = (|| {
        let mut init = TickRecord::new(0, 0.0);
        let r = runner.deliberate(&mut init);
        trace.init = init;
        r?;
        for k in 1..=ticks {
            let mut rec = TickRecord::new(k, runner.sim.time(&cfg.sim));
            let r = runner.apply_pending(&mut rec).and_then(|()| {
                let out = runner.sim.tick(&cfg.sim);
                rec.t = out.row.t;
                rec.sim = Some(trace::csv_row(&out.row));
                rec.sim_events = out.events;
                rec.clipped = out.clipped;
                for p in out.percepts {
                    runner.abstraction.replace_percept(p)?;
                }
                runner.deliberate(&mut rec)
            });
            trace.ticks.push(rec);
            r?;
        }
        Ok(())
    })();
    trace.registry = runner.registry;
    result
}
