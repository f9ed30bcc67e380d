use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use super::{ContinuousError, MeanMotion, StateVector};

/// Normalised determinant threshold for the position-from-velocity block
/// (the determinant is scaled by n³ to make it dimensionless).
const SINGULAR_DET: f64 = 1e-12;

struct Blocks {
    rr: Matrix3<f64>,
    rv: Matrix3<f64>,
    vr: Matrix3<f64>,
    vv: Matrix3<f64>,
}

fn blocks(t: f64, n: f64) -> Blocks {
    let nt = n * t;
    let s = libm::sin(nt);
    let c = libm::cos(nt);
    #[rustfmt::skip]
    let b = Blocks {
        rr: Matrix3::new(
            4.0 - 3.0 * c,        0.0, 0.0,
            6.0 * (s - nt),       1.0, 0.0,
            0.0,                  0.0, c,
        ),
        rv: Matrix3::new(
            s / n,                2.0 * (1.0 - c) / n,     0.0,
            -2.0 * (1.0 - c) / n, (4.0 * s - 3.0 * nt) / n, 0.0,
            0.0,                  0.0,                     s / n,
        ),
        vr: Matrix3::new(
            3.0 * n * s,          0.0, 0.0,
            -6.0 * n * (1.0 - c), 0.0, 0.0,
            0.0,                  0.0, -n * s,
        ),
        vv: Matrix3::new(
            c,        2.0 * s,       0.0,
            -2.0 * s, 4.0 * c - 3.0, 0.0,
            0.0,      0.0,           c,
        ),
    };
    b
}

/// The 6x6 Clohessy-Wiltshire state-transition matrix for elapsed time
/// `t`.
pub fn cw_stm(t: f64, n: MeanMotion) -> Matrix6<f64> {
    let b = blocks(t, n.value());
    let mut m = Matrix6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&b.rr);
    m.fixed_view_mut::<3, 3>(0, 3).copy_from(&b.rv);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&b.vr);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&b.vv);
    m
}

/// Exact solution of
///
/// ```text
/// x'' - 3n²x - 2n y' = 0
/// y'' + 2n x'        = 0
/// z'' + n² z         = 0
/// ```
///
/// after `t` seconds.
pub fn cw_transition(s: &StateVector, t: f64, n: MeanMotion) -> StateVector {
    debug_assert!(t >= 0.0);
    let x = Vector6::from_row_slice(&s.to_array());
    let y = cw_stm(t, n) * x;
    StateVector::new(Vector3::new(y[0], y[1], y[2]), Vector3::new(y[3], y[4], y[5]))
}

/// Two impulses that take `s` to the slot centre at rest after `horizon`
/// seconds.
///
/// `dv1` is applied at once so that the coasting arc reaches r = 0 at
/// `horizon`; `dv2` cancels the arrival velocity.
pub fn solve_two_impulse(
    s: &StateVector,
    horizon: f64,
    n: MeanMotion,
) -> Result<(Vector3<f64>, Vector3<f64>), ContinuousError> {
    let nv = n.value();
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(ContinuousError::SingularHorizon { horizon });
    }
    let b = blocks(horizon, nv);
    let scaled_det = b.rv.determinant() * nv.powi(3);
    if !(scaled_det.abs() >= SINGULAR_DET) {
        return Err(ContinuousError::SingularHorizon { horizon });
    }
    let rhs = -(b.rr * s.r);
    let v0 = b
        .rv
        .lu()
        .solve(&rhs)
        .ok_or(ContinuousError::SingularHorizon { horizon })?;
    let v_arrival = b.vr * s.r + b.vv * v0;
    Ok((v0 - s.v, -v_arrival))
}
