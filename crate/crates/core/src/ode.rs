//! Classical RK4 integration of the Jacobi equation `4ζ'' - ζ - 3<ζ,Jγ̇>Jγ̇ = 0`
//! in a parallel frame, where `Jγ̇` has constant coordinates.
//!
//! Used only as an independent oracle for the closed-form Jacobi fields.

use nalgebra::DVector;

use crate::error::{check_dim, GeometryError, Result};

pub const MAX_STEP: f64 = 1e-2;
pub const MAX_T: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiTrajectory {
    pub times: Vec<f64>,
    pub values: Vec<DVector<f64>>,
    pub derivatives: Vec<DVector<f64>>,
}

fn acceleration(zeta: &DVector<f64>, j_xi: &DVector<f64>) -> DVector<f64> {
    (zeta + j_xi * (3.0 * zeta.dot(j_xi))) * 0.25
}

/// Integrates from `t = 0` to `t_end` on a uniform grid whose spacing is the
/// largest value `<= step` dividing `t_end`.
pub fn integrate_jacobi_ode(
    initial_value: &DVector<f64>,
    initial_derivative: &DVector<f64>,
    j_xi: &DVector<f64>,
    t_end: f64,
    step: f64,
) -> Result<JacobiTrajectory> {
    check_dim(initial_value.len(), initial_derivative.len())?;
    check_dim(initial_value.len(), j_xi.len())?;
    if !(step > 0.0 && step <= MAX_STEP) {
        return Err(GeometryError::Precondition(format!(
            "step must lie in (0, {MAX_STEP}], got {step}"
        )));
    }
    if !(0.0..=MAX_T).contains(&t_end) {
        return Err(GeometryError::Precondition(format!(
            "t_end must lie in [0, {MAX_T}], got {t_end}"
        )));
    }
    let steps = ((t_end / step) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };

    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut derivatives = Vec::with_capacity(steps + 1);
    let (mut x, mut v) = (initial_value.clone(), initial_derivative.clone());
    times.push(0.0);
    values.push(x.clone());
    derivatives.push(v.clone());
    for i in 1..=steps {
        let k1x = v.clone();
        let k1v = acceleration(&x, j_xi);
        let k2x = &v + &k1v * (0.5 * h);
        let k2v = acceleration(&(&x + &k1x * (0.5 * h)), j_xi);
        let k3x = &v + &k2v * (0.5 * h);
        let k3v = acceleration(&(&x + &k2x * (0.5 * h)), j_xi);
        let k4x = &v + &k3v * h;
        let k4v = acceleration(&(&x + &k3x * h), j_xi);
        x += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        times.push(i as f64 * h);
        values.push(x.clone());
        derivatives.push(v.clone());
    }
    Ok(JacobiTrajectory {
        times,
        values,
        derivatives,
    })
}
