//! Forward dynamics: force models, orbit integration, and
//! apsidal-precession measurement.
//!
//! Canonical units throughout: unit mass, and scenario constants chosen so
//! the force scale and semilatus rectum default to one (the problem is
//! scale-free).

mod forces;
mod integrate;
mod precession;

pub use forces::{
    binet_residual, ExpressionForce, ManevCoefficient, ManevForce, ManevParams, NewtonianForce,
};
pub use integrate::{integrate, IntegrateError, IntegratorOptions, Trajectory};
pub use precession::{measure_precession, predicted_advance, ApsidalReport, PrecessionError};

use crate::force::PlanarForce;
use serde::Serialize;

/// One point of a planar trajectory with its derived diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrajectoryState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub r: f64,
    /// Polar angle, unwrapped to be continuous along the trajectory.
    pub theta: f64,
    /// `v^2/2 + V(x, y)`; NaN when the force has no potential.
    pub energy: f64,
    /// `x vy - y vx`.
    pub angular_momentum: f64,
}

impl TrajectoryState {
    /// Builds a state with derived quantities; `prev_theta` continues the
    /// unwrapped angle across the branch cut.
    pub fn from_raw(
        t: f64,
        x: f64,
        y: f64,
        vx: f64,
        vy: f64,
        force: &dyn PlanarForce,
        prev_theta: Option<f64>,
    ) -> TrajectoryState {
        let r = (x * x + y * y).sqrt();
        let raw = y.atan2(x);
        let theta = match prev_theta {
            None => raw,
            Some(prev) => {
                let delta = raw - prev;
                prev + delta.sin().atan2(delta.cos())
            }
        };
        let energy = match force.potential(x, y) {
            Some(Ok(v)) => 0.5 * (vx * vx + vy * vy) + v,
            _ => f64::NAN,
        };
        TrajectoryState {
            t,
            x,
            y,
            vx,
            vy,
            r,
            theta,
            energy,
            angular_momentum: x * vy - y * vx,
        }
    }
}

/// Perihelion start of the conic member with the given eccentricity and
/// apse orientation: position `p/(1+e)` along `theta0`, velocity
/// perpendicular with `h = sqrt(F0 p)`.
pub fn initial_conditions_for_member(
    params: &ManevParams,
    e: f64,
    theta0: f64,
) -> TrajectoryState {
    let r0 = params.p / (1.0 + e);
    let h = params.h_squared().sqrt();
    let speed = h / r0;
    let (x, y) = (r0 * theta0.cos(), r0 * theta0.sin());
    let (vx, vy) = (-speed * theta0.sin(), speed * theta0.cos());
    TrajectoryState::from_raw(0.0, x, y, vx, vy, &ManevForce::new(*params), None)
}

/// Time per radial period of the conic member (perihelion to perihelion):
/// `2 pi p^2 / (h b (1 - e^2)^{3/2})`.
pub fn radial_period(params: &ManevParams, e: f64) -> f64 {
    let h = params.h_squared().sqrt();
    2.0 * std::f64::consts::PI * params.p * params.p
        / (h * params.b * (1.0 - e * e).powf(1.5))
}
