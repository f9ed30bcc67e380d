//! The continuous agent part: calculations the discrete engines call
//! synchronously.
//!
//! All dynamics are the linear Clohessy-Wiltshire model in the Hill frame
//! of the geostationary slot: x radial, y along-track, z cross-track.

mod control;
mod cw;
mod registry;

use std::fmt;

use nalgebra::Vector3;
use thiserror::Error;

pub use control::synthesize_controller;
pub use cw::{cw_stm, cw_transition, solve_two_impulse};
pub use registry::{ControllerSpec, Impulse, ManeuverPlan, Registry, RegistryError};

/// Sidereal day, seconds.
pub const SIDEREAL_DAY: f64 = 86164.0905;

/// Default maneuver horizon, seconds.
pub const DEFAULT_HORIZON: f64 = 14_400.0;

/// Horizon shrink factor applied once when the first horizon is singular.
pub const HORIZON_RETRY_FACTOR: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuousError {
    #[error("state vector has non-finite components")]
    NonFinite,
    #[error("two-impulse targeting is singular for horizon {horizon} s")]
    SingularHorizon { horizon: f64 },
    #[error("axis {0} has no working thruster")]
    UncontrollableAxis(Axis),
    #[error("invalid thruster status: {0}")]
    InvalidThrusters(String),
    #[error("settling time must be positive, got {0}")]
    InvalidSettle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// Mean motion of the reference orbit, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanMotion(f64);

impl MeanMotion {
    pub fn new(rad_per_s: f64) -> Option<Self> {
        (rad_per_s.is_finite() && rad_per_s > 0.0).then_some(MeanMotion(rad_per_s))
    }

    pub fn geostationary() -> Self {
        MeanMotion(2.0 * std::f64::consts::PI / SIDEREAL_DAY)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Orbital period, seconds.
    pub fn period(self) -> f64 {
        2.0 * std::f64::consts::PI / self.0
    }
}

impl Default for MeanMotion {
    fn default() -> Self {
        Self::geostationary()
    }
}

/// Position (m) and velocity (m/s) relative to the slot centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector {
    pub r: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl StateVector {
    pub fn new(r: Vector3<f64>, v: Vector3<f64>) -> Self {
        StateVector { r, v }
    }

    pub fn zero() -> Self {
        StateVector::new(Vector3::zeros(), Vector3::zeros())
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        StateVector::new(Vector3::new(a[0], a[1], a[2]), Vector3::new(a[3], a[4], a[5]))
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.r.x, self.r.y, self.r.z, self.v.x, self.v.y, self.v.z]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

/// Deadband radius around the slot centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsSpec {
    radius: f64,
}

impl BoundsSpec {
    pub const DEFAULT_RADIUS: f64 = 5000.0;

    pub fn new(radius: f64) -> Option<Self> {
        (radius.is_finite() && radius > 0.0).then_some(BoundsSpec { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Default for BoundsSpec {
    fn default() -> Self {
        BoundsSpec {
            radius: Self::DEFAULT_RADIUS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proximity {
    In,
    Out,
}

impl Proximity {
    pub fn as_str(self) -> &'static str {
        match self {
            Proximity::In => "in",
            Proximity::Out => "out",
        }
    }
}

/// `in` iff the position lies within the deadband (boundary included).
pub fn comp_distance(s: &StateVector, bounds: &BoundsSpec) -> Result<Proximity, ContinuousError> {
    if !s.is_finite() {
        return Err(ContinuousError::NonFinite);
    }
    Ok(if s.r.norm() <= bounds.radius() {
        Proximity::In
    } else {
        Proximity::Out
    })
}

/// Thruster health. Thrusters point along +x, -x, +y, -y, +z, -z, in
/// that index order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrusterStatus {
    health: [f64; 6],
    max_accel: f64,
}

impl ThrusterStatus {
    pub fn new(health: [f64; 6], max_accel: f64) -> Result<Self, ContinuousError> {
        if let Some(h) = health.iter().find(|h| !(0.0..=1.0).contains(*h)) {
            return Err(ContinuousError::InvalidThrusters(format!("health {h} outside [0, 1]")));
        }
        if !(max_accel.is_finite() && max_accel > 0.0) {
            return Err(ContinuousError::InvalidThrusters(format!(
                "max_accel {max_accel} must be positive"
            )));
        }
        Ok(ThrusterStatus { health, max_accel })
    }

    pub fn nominal(max_accel: f64) -> Result<Self, ContinuousError> {
        Self::new([1.0; 6], max_accel)
    }

    pub fn health(&self) -> [f64; 6] {
        self.health
    }

    pub fn max_accel(&self) -> f64 {
        self.max_accel
    }

    pub fn set_health(&mut self, thruster: usize, health: f64) -> Result<(), ContinuousError> {
        if thruster >= 6 || !(0.0..=1.0).contains(&health) {
            return Err(ContinuousError::InvalidThrusters(format!(
                "thruster {thruster} health {health}"
            )));
        }
        self.health[thruster] = health;
        Ok(())
    }

    /// Achievable acceleration per signed direction, m/s².
    pub fn axis_limits(&self) -> [f64; 6] {
        self.health.map(|h| h * self.max_accel)
    }
}

/// Builds a two-impulse plan back to the slot centre and registers it.
/// Retries once with a shortened horizon if the first is singular.
pub fn plan_approach_to_centre(
    s: &StateVector,
    n: MeanMotion,
    horizon: f64,
    registry: &mut Registry,
) -> Result<String, ContinuousError> {
    if !s.is_finite() {
        return Err(ContinuousError::NonFinite);
    }
    let (horizon, (dv1, dv2)) = match solve_two_impulse(s, horizon, n) {
        Ok(dvs) => (horizon, dvs),
        Err(ContinuousError::SingularHorizon { .. }) => {
            let retry = HORIZON_RETRY_FACTOR * horizon;
            (retry, solve_two_impulse(s, retry, n)?)
        }
        Err(e) => return Err(e),
    };
    let plan = ManeuverPlan::new(
        vec![
            Impulse {
                time_offset: 0.0,
                delta_v: dv1,
            },
            Impulse {
                time_offset: horizon,
                delta_v: dv2,
            },
        ],
        horizon,
    );
    Ok(registry.add_plan(plan))
}
