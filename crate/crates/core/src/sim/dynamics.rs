use nalgebra::Vector3;

use crate::continuous::{ControllerSpec, MeanMotion, StateVector};

fn derivative(s: &[f64; 6], a: &Vector3<f64>, n: f64) -> [f64; 6] {
    let n2 = n * n;
    [
        s[3],
        s[4],
        s[5],
        3.0 * n2 * s[0] + 2.0 * n * s[4] + a.x,
        -2.0 * n * s[3] + a.y,
        -n2 * s[2] + a.z,
    ]
}

fn axpy(y: &[f64; 6], h: f64, k: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// One classical RK4 step of the CW equations with a constant applied
/// acceleration over the step.
pub fn step_dynamics(sv: &StateVector, accel: &Vector3<f64>, dt: f64, n: MeanMotion) -> StateVector {
    let n = n.value();
    let y = sv.to_array();
    let k1 = derivative(&y, accel, n);
    let k2 = derivative(&axpy(&y, 0.5 * dt, &k1), accel, n);
    let k3 = derivative(&axpy(&y, 0.5 * dt, &k2), accel, n);
    let k4 = derivative(&axpy(&y, dt, &k3), accel, n);
    StateVector::from_array(std::array::from_fn(|i| {
        y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

/// Clamps each component to the limit of the direction it points in.
/// `limits` is ordered +x, -x, +y, -y, +z, -z.
pub fn clamp_per_direction(a: &Vector3<f64>, limits: &[f64; 6]) -> Vector3<f64> {
    Vector3::from_fn(|i, _| {
        let c = a[i];
        if c >= 0.0 {
            c.min(limits[2 * i])
        } else {
            c.max(-limits[2 * i + 1])
        }
    })
}

/// PD acceleration command `-kp r - kd v`, saturated per direction.
pub fn feedback_accel(c: &ControllerSpec, sv: &StateVector) -> Vector3<f64> {
    let raw = -c.kp * sv.r - c.kd * sv.v;
    clamp_per_direction(&raw, &c.axis_limit)
}
