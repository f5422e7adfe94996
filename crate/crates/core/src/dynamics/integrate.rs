//! Planar trajectory integration for unit-mass motion in a force field.

use super::TrajectoryState;
use crate::force::PlanarForce;
use crate::rk::{self, RkError, RkOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("exceeded {max} integration steps")]
    MaxStepsExceeded { max: usize },
    #[error("force evaluation failed during integration: {0}")]
    Force(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-11,
            abs_tol: 1e-13,
            max_steps: 20_000_000,
        }
    }
}

/// Accepted integrator states plus run counters.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<TrajectoryState>,
    pub accepted_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryState {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// Integrates the trajectory from `initial` to time `t_end` (either
/// direction), recording every accepted step with derived radius, unwrapped
/// polar angle, energy (when the force has a potential) and angular
/// momentum.
pub fn integrate(
    force: &dyn PlanarForce,
    initial: &TrajectoryState,
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory, IntegrateError> {
    let rhs = |_t: f64, s: &[f64; 4]| -> Result<[f64; 4], String> {
        let (ax, ay) = force.components(s[0], s[1]).map_err(|e| e.to_string())?;
        Ok([s[2], s[3], ax, ay])
    };
    let rk_opts = RkOptions {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_steps: opts.max_steps,
        initial_step: None,
    };
    let mut states: Vec<TrajectoryState> = Vec::new();
    let mut prev_theta: Option<f64> = None;
    let y0 = [initial.x, initial.y, initial.vx, initial.vy];
    let result = rk::integrate(rhs, initial.t, y0, t_end, &rk_opts, |step| {
        let state = TrajectoryState::from_raw(
            step.t,
            step.y[0],
            step.y[1],
            step.y[2],
            step.y[3],
            force,
            prev_theta,
        );
        prev_theta = Some(state.theta);
        states.push(state);
    });
    match result {
        Ok(_) => Ok(Trajectory {
            accepted_steps: states.len().saturating_sub(1),
            states,
        }),
        Err(RkError::StepSizeUnderflow { t, .. }) => Err(IntegrateError::StepSizeUnderflow { t }),
        Err(RkError::MaxStepsExceeded { max }) => Err(IntegrateError::MaxStepsExceeded { max }),
        Err(RkError::Rhs { reason, .. }) => Err(IntegrateError::Force(reason)),
    }
}
