//! Embedded Dormand-Prince 5(4) adaptive Runge-Kutta core with PI step-size
//! control (Hairer-style controller, FSAL).  Generic over the state
//! dimension; callers receive every accepted step through an observer.

#[derive(Debug, thiserror::Error)]
pub enum RkError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("exceeded {max} integration steps")]
    MaxStepsExceeded { max: usize },
    #[error("derivative evaluation failed at t = {t}: {reason}")]
    Rhs { t: f64, reason: String },
}

#[derive(Debug, Clone)]
pub struct RkOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for RkOptions {
    fn default() -> Self {
        RkOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 20_000_000,
            initial_step: None,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

/// Error coefficients: 5th-order weights minus the embedded 4th-order ones.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct StepRecord<'a, const N: usize> {
    pub t: f64,
    pub y: &'a [f64; N],
    /// Derivative at this state (start-of-next-step slope via FSAL).
    pub dy: &'a [f64; N],
}

/// Integrates dy/dt = rhs(t, y) from `t0` to `t1` (either direction).
/// The observer sees the initial state and every accepted step.
pub fn integrate<const N: usize, F, O>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    opts: &RkOptions,
    mut observe: O,
) -> Result<[f64; N], RkError>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N], String>,
    O: FnMut(StepRecord<'_, N>),
{
    let eval = |t: f64, y: &[f64; N]| rhs(t, y).map_err(|reason| RkError::Rhs { t, reason });
    if t0 == t1 {
        let dy = eval(t0, &y0)?;
        observe(StepRecord { t: t0, y: &y0, dy: &dy });
        return Ok(y0);
    }
    let dir = (t1 - t0).signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = eval(t, &y)?;
    observe(StepRecord { t, y: &y, dy: &k1 });

    let mut h = match opts.initial_step {
        Some(h0) => h0.abs() * dir,
        None => initial_step(&eval, t, &y, &k1, dir, opts)?,
    };

    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;
    // PI controller constants (order-5 pair)
    let beta = 0.04;
    let expo = 0.2 - beta * 0.75;
    let (fac_min, fac_max, safety) = (0.2, 10.0, 0.9);

    loop {
        if steps >= opts.max_steps {
            return Err(RkError::MaxStepsExceeded { max: opts.max_steps });
        }
        steps += 1;

        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() <= t.abs() * f64::EPSILON * 16.0 + f64::MIN_POSITIVE * 16.0 {
            return Err(RkError::StepSizeUnderflow { t, h });
        }

        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        let mut failed_eval = None;
        for stage in 0..6 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage + 1) {
                    acc += A[stage][j] * kj[i];
                }
                *yi += h * acc;
            }
            match eval(t + C[stage] * h, &ys) {
                Ok(ki) => k[stage + 1] = ki,
                Err(e) => {
                    failed_eval = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed_eval {
            // retry with a smaller step; the trajectory may be skirting a
            // singularity of the force
            h *= 0.25;
            if h.abs() <= t.abs() * f64::EPSILON * 16.0 + f64::MIN_POSITIVE * 16.0 {
                return Err(e);
            }
            continue;
        }

        // 5th-order solution is stage row 6 of A (FSAL), already in k[6]'s state
        let mut y_new = y;
        for (i, yi) in y_new.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(6) {
                acc += A[5][j] * kj[i];
            }
            *yi += h * acc;
        }

        // error estimate against the embedded 4th-order solution
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / scale) * (e / scale);
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k[6];
            observe(StepRecord { t, y: &y, dy: &k1 });
            if (t - t1) * dir >= 0.0 {
                return Ok(y);
            }
            let fac = (err.powf(expo) / err_old.powf(beta) / safety)
                .clamp(1.0 / fac_max, 1.0 / fac_min);
            err_old = err.max(1e-4);
            h /= fac;
        } else {
            let fac = (err.powf(expo) / safety).min(1.0 / fac_min);
            h /= fac;
        }
    }
}

/// Standard automatic initial-step heuristic (order-5 variant).
fn initial_step<const N: usize>(
    eval: &impl Fn(f64, &[f64; N]) -> Result<[f64; N], RkError>,
    t: f64,
    y: &[f64; N],
    dy: &[f64; N],
    dir: f64,
    opts: &RkOptions,
) -> Result<f64, RkError> {
    let sc = |i: usize| opts.abs_tol + opts.rel_tol * y[i].abs();
    let d0 = (y.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d1 = (dy.iter().enumerate().map(|(i, v)| (v / sc(i)).powi(2)).sum::<f64>() / N as f64).sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let mut y1 = *y;
    for (i, v) in y1.iter_mut().enumerate() {
        *v += dir * h0 * dy[i];
    }
    let dy1 = eval(t + dir * h0, &y1)?;
    let d2 = (dy1
        .iter()
        .zip(dy.iter())
        .enumerate()
        .map(|(i, (a, b))| ((a - b) / sc(i)).powi(2))
        .sum::<f64>()
        / N as f64)
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1) * dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_growth() {
        let y = integrate(
            |_t, y: &[f64; 1]| Ok([y[0]]),
            0.0,
            [1.0],
            1.0,
            &RkOptions::default(),
            |_| {},
        )
        .unwrap();
        assert_relative_eq!(y[0], 1.0f64.exp(), max_relative = 1e-10);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let y = integrate(
            |_t, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            &RkOptions::default(),
            |_| {},
        )
        .unwrap();
        assert_relative_eq!(y[0], 1.0, max_relative = 1e-8);
        assert_relative_eq!(y[1], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn backward_integration() {
        let y = integrate(
            |t, _y: &[f64; 1]| Ok([2.0 * t]),
            1.0,
            [1.0],
            0.0,
            &RkOptions::default(),
            |_| {},
        )
        .unwrap();
        assert_relative_eq!(y[0], 0.0, epsilon = 1e-10);
    }

    #[test]
    fn max_steps_is_enforced() {
        let opts = RkOptions {
            max_steps: 10,
            ..Default::default()
        };
        let res = integrate(
            |_t, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [1.0, 0.0],
            1e6,
            &opts,
            |_| {},
        );
        assert!(matches!(res, Err(RkError::MaxStepsExceeded { .. })));
    }
}
