//! Apsidal-precession measurement from integrated trajectories.
//!
//! Perihelion passages are sign changes of the radial velocity from
//! negative to positive, refined inside an accepted step by root-solving a
//! cubic Hermite interpolant of `dr/dt` (endpoint values and slopes), after
//! which the perihelion angle comes from the matching Hermite interpolant
//! of the unwrapped polar angle.  The advance per radial period is the
//! angle between consecutive perihelia minus a full turn; for the
//! precessing conic the prediction is `2 pi (1/b - 1)`.

use super::{Trajectory, TrajectoryState};
use crate::force::PlanarForce;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PrecessionError {
    #[error("trajectory spans fewer than two radial minima ({found} found)")]
    InsufficientRevolutions { found: usize },
    #[error("force evaluation failed while refining a perihelion: {0}")]
    Force(String),
}

/// Perihelion passages and the apsidal advance they imply.
#[derive(Debug, Clone, Serialize)]
pub struct ApsidalReport {
    pub perihelion_times: Vec<f64>,
    /// Unwrapped polar angles of the passages.
    pub perihelion_angles: Vec<f64>,
    /// Angle between consecutive passages minus 2 pi.
    pub advances: Vec<f64>,
    pub mean_advance: f64,
    /// Max minus min of the advance samples.
    pub advance_spread: f64,
}

struct Hermite {
    t0: f64,
    h: f64,
    f0: f64,
    f1: f64,
    d0: f64,
    d1: f64,
}

impl Hermite {
    fn eval(&self, t: f64) -> f64 {
        let s = (t - self.t0) / self.h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.f0
            + (s3 - 2.0 * s2 + s) * self.h * self.d0
            + (-2.0 * s3 + 3.0 * s2) * self.f1
            + (s3 - s2) * self.h * self.d1
    }
}

/// dr/dt and its time derivative at a state, given the acceleration there.
fn radial_rates(s: &TrajectoryState, accel: (f64, f64)) -> (f64, f64) {
    let r = s.r;
    let rdot = (s.x * s.vx + s.y * s.vy) / r;
    let v2 = s.vx * s.vx + s.vy * s.vy;
    let rddot = (v2 + s.x * accel.0 + s.y * accel.1 - rdot * rdot) / r;
    (rdot, rddot)
}

fn theta_rate(s: &TrajectoryState) -> f64 {
    (s.x * s.vy - s.y * s.vx) / (s.r * s.r)
}

/// Locates perihelion passages on a trajectory and reports the apsidal
/// advance per radial period.
pub fn measure_precession(
    trajectory: &Trajectory,
    force: &dyn PlanarForce,
) -> Result<ApsidalReport, PrecessionError> {
    let states = &trajectory.states;
    let mut times = Vec::new();
    let mut angles = Vec::new();

    let accel = |s: &TrajectoryState| {
        force
            .components(s.x, s.y)
            .map_err(|e| PrecessionError::Force(e.to_string()))
    };

    for pair in states.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (rd_a, rdd_a) = radial_rates(a, accel(a)?);
        let (rd_b, rdd_b) = radial_rates(b, accel(b)?);
        if !(rd_a < 0.0 && rd_b >= 0.0) {
            continue;
        }
        let h = b.t - a.t;
        let interp = Hermite {
            t0: a.t,
            h,
            f0: rd_a,
            f1: rd_b,
            d0: rdd_a,
            d1: rdd_b,
        };
        // bisection on the Hermite cubic; the bracket is guaranteed
        let (mut lo, mut hi) = (a.t, b.t);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if interp.eval(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        let t_star = 0.5 * (lo + hi);
        let theta_interp = Hermite {
            t0: a.t,
            h,
            f0: a.theta,
            f1: b.theta,
            d0: theta_rate(a),
            d1: theta_rate(b),
        };
        times.push(t_star);
        angles.push(theta_interp.eval(t_star));
    }

    if times.len() < 2 {
        return Err(PrecessionError::InsufficientRevolutions { found: times.len() });
    }

    let tau = 2.0 * std::f64::consts::PI;
    let advances: Vec<f64> = angles.windows(2).map(|w| w[1] - w[0] - tau).collect();
    let mean_advance = advances.iter().sum::<f64>() / advances.len() as f64;
    let advance_spread = advances.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - advances.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ApsidalReport {
        perihelion_times: times,
        perihelion_angles: angles,
        advances,
        mean_advance,
        advance_spread,
    })
}

/// Apsidal advance of the precessing conic per radial period.
pub fn predicted_advance(b: f64) -> f64 {
    2.0 * std::f64::consts::PI * (1.0 / b - 1.0)
}
