use super::{Axis, ContinuousError, Registry, ThrusterStatus};

/// Minimum closed-loop damping ratio accepted for a synthesized
/// controller.
pub const MIN_DAMPING: f64 = 0.7;

/// Settling-time factor for a 2% band of a critically damped loop.
const SETTLE_FACTOR: f64 = 4.6;

/// Builds a per-axis PD controller for the given thruster health and
/// registers it.
///
/// Gains depend only on `target_settle` (kp = (4.6/Ts)², kd = 2·sqrt(kp),
/// critically damped); thruster health only shapes the saturation
/// limits.
pub fn synthesize_controller(
    thrusters: &ThrusterStatus,
    target_settle: f64,
    registry: &mut Registry,
) -> Result<String, ContinuousError> {
    if !(target_settle.is_finite() && target_settle > 0.0) {
        return Err(ContinuousError::InvalidSettle(target_settle));
    }
    let health = thrusters.health();
    for (axis, pair) in [Axis::X, Axis::Y, Axis::Z].into_iter().zip(health.chunks(2)) {
        if pair.iter().all(|h| *h == 0.0) {
            return Err(ContinuousError::UncontrollableAxis(axis));
        }
    }
    let kp = (SETTLE_FACTOR / target_settle).powi(2);
    let kd = 2.0 * kp.sqrt();
    debug_assert!(kd >= 2.0 * kp.sqrt() * MIN_DAMPING);
    Ok(registry.add_controller(kp, kd, thrusters.axis_limits()))
}
