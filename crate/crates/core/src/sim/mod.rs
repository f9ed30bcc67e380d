//! The simulated real-time control system: plant, thrusters, on-board
//! controller and the actions the reasoning engine can invoke.

mod dynamics;

use std::fmt;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::continuous::{BoundsSpec, ControllerSpec, ManeuverPlan, MeanMotion, Registry, StateVector, ThrusterStatus};
use crate::lang::Term;

pub use dynamics::{clamp_per_direction, feedback_accel, step_dynamics};

/// Direction labels in thruster index order.
pub const DIRECTIONS: [&str; 6] = ["+x", "-x", "+y", "-y", "+z", "-z"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("unknown maneuver plan {0}")]
    UnknownPlan(String),
    #[error("unknown controller {0}")]
    UnknownController(String),
    #[error("invalid simulation config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fault {
    pub time: f64,
    pub thruster: usize,
    pub health: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Disturbance {
    pub constant: Vector3<f64>,
    /// Half-width of the zero-mean uniform component, per axis.
    pub amplitude: f64,
}

impl Default for Disturbance {
    fn default() -> Self {
        Disturbance {
            constant: Vector3::new(1e-7, 0.0, 0.0),
            amplitude: 1e-8,
        }
    }
}

impl Disturbance {
    pub fn none() -> Self {
        Disturbance {
            constant: Vector3::zeros(),
            amplitude: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: MeanMotion,
    pub dt: f64,
    pub duration: f64,
    pub bounds: BoundsSpec,
    pub disturbance: Disturbance,
    pub seed: u64,
    pub initial: StateVector,
    /// Per-thruster acceleration at full health, m/s².
    pub max_accel: f64,
    pub faults: Vec<Fault>,
}

impl SimConfig {
    pub const DEFAULT_DT: f64 = 10.0;
    pub const DEFAULT_MAX_ACCEL: f64 = 0.1;

    pub fn new(initial: StateVector, duration: f64) -> Self {
        SimConfig {
            n: MeanMotion::geostationary(),
            dt: Self::DEFAULT_DT,
            duration,
            bounds: BoundsSpec::default(),
            disturbance: Disturbance::default(),
            seed: 0,
            initial,
            max_accel: Self::DEFAULT_MAX_ACCEL,
            faults: Vec::new(),
        }
    }

    /// Number of ticks; `duration` must be a non-negative multiple of `dt`.
    pub fn ticks(&self) -> Result<u64, SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        let k = self.duration / self.dt;
        if !(k.is_finite() && k >= 0.0) || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
            return Err(SimError::Config(format!(
                "duration {} is not a multiple of dt {}",
                self.duration, self.dt
            )));
        }
        Ok(k.round() as u64)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.ticks()?;
        if !self.initial.is_finite() {
            return Err(SimError::Config("initial state is not finite".into()));
        }
        if !(self.max_accel.is_finite() && self.max_accel > 0.0) {
            return Err(SimError::Config("max_accel must be positive".into()));
        }
        if !(self.disturbance.amplitude >= 0.0) || !self.disturbance.constant.iter().all(|c| c.is_finite()) {
            return Err(SimError::Config("invalid disturbance".into()));
        }
        for f in &self.faults {
            if f.thruster >= 6 || !(0.0..=1.0).contains(&f.health) || !(f.time >= 0.0) {
                return Err(SimError::Config(format!("invalid fault {f:?}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    StationKeeping { controller: String },
    Maneuver { plan: ManeuverPlan, start: f64, applied: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::StationKeeping { controller } => write!(f, "station_keeping({controller})"),
            Mode::Maneuver { plan, .. } => write!(f, "maneuver({})", plan.id),
        }
    }
}

/// One row of the state trace, taken after the tick's integration step.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub t: f64,
    pub state: [f64; 6],
    pub mode: String,
    pub health: [f64; 6],
    pub accel_cmd: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TickOutput {
    pub percepts: Vec<Term>,
    pub row: SimRow,
    /// Notes on faults applied, impulses fired and clipped.
    pub events: Vec<String>,
    /// Number of impulse components that had to be clipped.
    pub clipped: usize,
}

#[derive(Debug, Clone)]
pub struct SimState {
    tick: u64,
    sv: StateVector,
    thrusters: ThrusterStatus,
    mode: Mode,
    controller: ControllerSpec,
    faults: Vec<Fault>,
    next_fault: usize,
    rng: ChaCha8Rng,
}

impl SimState {
    pub fn new(cfg: &SimConfig, controller: ControllerSpec) -> Result<Self, SimError> {
        cfg.validate()?;
        let thrusters = ThrusterStatus::nominal(cfg.max_accel).map_err(|e| SimError::Config(e.to_string()))?;
        let mut faults = cfg.faults.clone();
        faults.sort_by(|a, b| a.time.total_cmp(&b.time));
        Ok(SimState {
            tick: 0,
            sv: cfg.initial,
            thrusters,
            mode: Mode::StationKeeping {
                controller: controller.id.clone(),
            },
            controller,
            faults,
            next_fault: 0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        })
    }

    /// Simulation time at the start of the next tick.
    pub fn time(&self, cfg: &SimConfig) -> f64 {
        self.tick as f64 * cfg.dt
    }

    pub fn ticks_done(&self) -> u64 {
        self.tick
    }

    pub fn state(&self) -> &StateVector {
        &self.sv
    }

    pub fn thrusters(&self) -> &ThrusterStatus {
        &self.thrusters
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn controller(&self) -> &ControllerSpec {
        &self.controller
    }

    /// Starts the named maneuver at the current time; feedback is off
    /// until the plan's horizon has elapsed.
    pub fn apply_controls(&mut self, cfg: &SimConfig, registry: &Registry, plan_id: &str) -> Result<(), SimError> {
        let plan = registry
            .plan(plan_id)
            .ok_or_else(|| SimError::UnknownPlan(plan_id.to_string()))?;
        self.mode = Mode::Maneuver {
            plan: plan.clone(),
            start: self.time(cfg),
            applied: 0,
        };
        Ok(())
    }

    /// Returns to station-keeping with the active controller, abandoning
    /// any maneuver.
    pub fn maintain_path(&mut self) {
        self.mode = Mode::StationKeeping {
            controller: self.controller.id.clone(),
        };
    }

    /// Installs a registered controller as the active one.
    pub fn use_controller(&mut self, registry: &Registry, id: &str) -> Result<(), SimError> {
        let c = registry
            .controller(id)
            .ok_or_else(|| SimError::UnknownController(id.to_string()))?;
        self.controller = c.clone();
        if let Mode::StationKeeping { controller } = &mut self.mode {
            *controller = id.to_string();
        }
        Ok(())
    }

    pub fn tick(&mut self, cfg: &SimConfig) -> TickOutput {
        let t = self.time(cfg);
        let mut events = Vec::new();
        let mut clipped = 0;

        while let Some(f) = self.faults.get(self.next_fault).filter(|f| f.time <= t) {
            self.thrusters
                .set_health(f.thruster, f.health)
                .expect("faults validated on construction");
            events.push(format!("fault: thruster {} health {}", DIRECTIONS[f.thruster], f.health));
            self.next_fault += 1;
        }

        let finished = match &self.mode {
            Mode::Maneuver { plan, start, .. } => (t - start > plan.horizon()).then(|| plan.id.clone()),
            Mode::StationKeeping { .. } => None,
        };
        if let Some(id) = finished {
            events.push(format!("maneuver {id} complete"));
            self.maintain_path();
        }

        let limits = self.thrusters.axis_limits();
        let accel_cmd = match &mut self.mode {
            Mode::StationKeeping { .. } => feedback_accel(&self.controller, &self.sv),
            Mode::Maneuver { plan, start, applied } => {
                while let Some(imp) = plan.impulses().get(*applied).filter(|i| *start + i.time_offset <= t) {
                    let max_dv = limits.map(|l| l * cfg.dt);
                    let dv = clamp_per_direction(&imp.delta_v, &max_dv);
                    for i in 0..3 {
                        if dv[i] != imp.delta_v[i] {
                            clipped += 1;
                            let dir = if imp.delta_v[i] >= 0.0 { 2 * i } else { 2 * i + 1 };
                            events.push(format!(
                                "clipped impulse {} of {} on {}: requested {:e}, applied {:e}",
                                *applied, plan.id, DIRECTIONS[dir], imp.delta_v[i], dv[i]
                            ));
                        }
                    }
                    self.sv.v += dv;
                    events.push(format!("impulse {} of {}", *applied, plan.id));
                    *applied += 1;
                }
                Vector3::zeros()
            }
        };

        let mut accel = clamp_per_direction(&accel_cmd, &limits) + cfg.disturbance.constant;
        if cfg.disturbance.amplitude > 0.0 {
            let a = cfg.disturbance.amplitude;
            for i in 0..3 {
                accel[i] += self.rng.gen_range(-a..=a);
            }
        }

        self.sv = step_dynamics(&self.sv, &accel, cfg.dt, cfg.n);
        self.tick += 1;

        let row = SimRow {
            t: self.time(cfg),
            state: self.sv.to_array(),
            mode: self.mode.to_string(),
            health: self.thrusters.health(),
            accel_cmd: [accel_cmd.x, accel_cmd.y, accel_cmd.z],
        };
        TickOutput {
            percepts: percepts(&self.sv, &self.thrusters),
            row,
            events,
            clipped,
        }
    }
}

/// Rounds to 9 significant digits so percept atoms print stably.
pub fn canonical(x: f64) -> f64 {
    format!("{x:.8e}").parse().expect("formatted float parses")
}

pub fn percepts(sv: &StateVector, thrusters: &ThrusterStatus) -> Vec<Term> {
    let nums = |xs: &[f64]| xs.iter().map(|&x| Term::num(canonical(x))).collect();
    vec![
        Term::compound("stateinfo", nums(&sv.to_array())),
        Term::compound("thrusterstatus", nums(&thrusters.health())),
    ]
}
