//! Scenario files.
//!
//! A scenario is a TOML document of dotted keys (`sim.dt = 10`, or the
//! same keys under a `[sim]` table). Unknown keys are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::Deserialize;

use super::{Engine, RunError};
use crate::continuous::{BoundsSpec, MeanMotion, StateVector, DEFAULT_HORIZON};
use crate::lang::{parse_term, Term};
use crate::sim::{Disturbance, Fault, SimConfig};

pub const DEFAULT_CYCLE_BUDGET: usize = 64;
pub const DEFAULT_TARGET_SETTLE: f64 = 3600.0;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    sim: RawSim,
    agent: RawAgent,
    #[serde(default)]
    controller: RawController,
    #[serde(default)]
    planner: RawPlanner,
    #[serde(default)]
    store: RawStore,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSim {
    dt: Option<f64>,
    duration: f64,
    mean_motion: Option<f64>,
    bounds_radius: Option<f64>,
    initial: [f64; 6],
    max_accel: Option<f64>,
    disturbance_constant: Option<[f64; 3]>,
    disturbance_amplitude: Option<f64>,
    #[serde(default)]
    faults: Vec<(f64, usize, f64)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAgent {
    abstraction_program: PathBuf,
    reasoning_program: PathBuf,
    cycle_budget: Option<usize>,
    #[serde(default)]
    abstraction_beliefs: Vec<String>,
    #[serde(default)]
    reasoning_beliefs: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawController {
    target_settle: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlanner {
    horizon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStore {
    #[serde(default)]
    initial_beliefs: Vec<String>,
}

/// A plan program together with where it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramSource {
    pub path: PathBuf,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// The scenario file text, kept for the trace header.
    pub source: String,
    pub sim: SimConfig,
    pub abstraction_program: ProgramSource,
    pub reasoning_program: ProgramSource,
    /// Deliberation cycles per engine per tick.
    pub cycle_budget: usize,
    pub abstraction_beliefs: Vec<Term>,
    pub reasoning_beliefs: Vec<Term>,
    pub store_beliefs: Vec<Term>,
    pub target_settle: f64,
    pub horizon: f64,
    pub out_dir: PathBuf,
}

impl ScenarioConfig {
    /// Reads a scenario file and the programs it names. Program paths
    /// are relative to the scenario file.
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse_with(&text, |p, _| {
            let full = base.join(p);
            fs::read_to_string(&full)
                .map(|text| ProgramSource { path: full.clone(), text })
                .map_err(|e| RunError::Io(format!("{}: {e}", full.display())))
        })
    }

    /// Builds a scenario from text, with program texts supplied directly
    /// (used when replaying a trace).
    pub fn from_texts(scenario: &str, abstraction: &str, reasoning: &str) -> Result<Self, RunError> {
        Self::parse_with(scenario, |p, engine| {
            Ok(ProgramSource {
                path: p.to_path_buf(),
                text: match engine {
                    Engine::Abstraction => abstraction,
                    Engine::Reasoning => reasoning,
                }
                .to_string(),
            })
        })
    }

    fn parse_with(
        text: &str,
        mut read: impl FnMut(&Path, Engine) -> Result<ProgramSource, RunError>,
    ) -> Result<Self, RunError> {
        let raw: RawScenario = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
        let config = |m: &str| RunError::Config(m.to_string());

        let s = raw.sim;
        let mut sim = SimConfig::new(StateVector::from_array(s.initial), s.duration);
        if let Some(dt) = s.dt {
            sim.dt = dt;
        }
        if let Some(n) = s.mean_motion {
            sim.n = MeanMotion::new(n).ok_or_else(|| config("sim.mean_motion must be positive"))?;
        }
        if let Some(r) = s.bounds_radius {
            sim.bounds = BoundsSpec::new(r).ok_or_else(|| config("sim.bounds_radius must be positive"))?;
        }
        if let Some(a) = s.max_accel {
            sim.max_accel = a;
        }
        let default = Disturbance::default();
        sim.disturbance = Disturbance {
            constant: s.disturbance_constant.map_or(default.constant, Vector3::from),
            amplitude: s.disturbance_amplitude.unwrap_or(default.amplitude),
        };
        sim.faults = s
            .faults
            .into_iter()
            .map(|(time, thruster, health)| Fault { time, thruster, health })
            .collect();
        sim.seed = raw.seed.unwrap_or(0);
        sim.validate().map_err(|e| RunError::Config(e.to_string()))?;

        let cycle_budget = raw.agent.cycle_budget.unwrap_or(DEFAULT_CYCLE_BUDGET);
        if cycle_budget == 0 {
            return Err(config("agent.cycle_budget must be at least 1"));
        }
        let target_settle = raw.controller.target_settle.unwrap_or(DEFAULT_TARGET_SETTLE);
        if !(target_settle.is_finite() && target_settle > 0.0) {
            return Err(config("controller.target_settle must be positive"));
        }
        let horizon = raw.planner.horizon.unwrap_or(DEFAULT_HORIZON);
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(config("planner.horizon must be positive"));
        }

        Ok(ScenarioConfig {
            source: text.to_string(),
            sim,
            abstraction_program: read(&raw.agent.abstraction_program, Engine::Abstraction)?,
            reasoning_program: read(&raw.agent.reasoning_program, Engine::Reasoning)?,
            cycle_budget,
            abstraction_beliefs: ground_atoms(&raw.agent.abstraction_beliefs, "agent.abstraction_beliefs")?,
            reasoning_beliefs: ground_atoms(&raw.agent.reasoning_beliefs, "agent.reasoning_beliefs")?,
            store_beliefs: ground_atoms(&raw.store.initial_beliefs, "store.initial_beliefs")?,
            target_settle,
            horizon,
            out_dir: raw.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.sim.seed = seed;
    }
}

fn ground_atoms(texts: &[String], key: &str) -> Result<Vec<Term>, RunError> {
    texts
        .iter()
        .map(|t| {
            let term = parse_term(t).map_err(|e| RunError::Config(format!("{key}: {t}: {e}")))?;
            if term.is_ground() {
                Ok(term)
            } else {
                Err(RunError::Config(format!("{key}: {t} is not ground")))
            }
        })
        .collect()
}
