//! Planar force abstraction shared by the inverse-problem pipeline (which
//! produces forces) and the dynamics module (which integrates them).
//!
//! Forces act on unit mass, so components are accelerations.  Implementors
//! with a closed form should override [`PlanarForce::with_partials`] with
//! exact derivatives; the default uses fourth-order central differences
//! with step `h = 1e-5 (1 + |coordinate|)`.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ForceError {
    #[error("force undefined at the coordinate origin")]
    OriginSingularity,
    #[error("force evaluation failed: {0}")]
    Eval(String),
}

/// Force components and their first partial derivatives at a point.
#[derive(Debug, Clone, Copy)]
pub struct ForceSample {
    pub fx: f64,
    pub fy: f64,
    pub fx_x: f64,
    pub fx_y: f64,
    pub fy_x: f64,
    pub fy_y: f64,
}

impl ForceSample {
    /// `X_y - Y_x`, zero for conservative fields.
    pub fn curl(&self) -> f64 {
        self.fx_y - self.fy_x
    }
}

pub trait PlanarForce {
    /// Force components `(X, Y)` at `(x, y)`.
    fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError>;

    /// Components plus first partials; default is fourth-order central
    /// finite differences of [`PlanarForce::components`].
    fn with_partials(&self, x: f64, y: f64) -> Result<ForceSample, ForceError> {
        let (fx, fy) = self.components(x, y)?;
        let hx = 1e-5 * (1.0 + x.abs());
        let hy = 1e-5 * (1.0 + y.abs());
        let dx = central4(|s| self.components(s, y), x, hx)?;
        let dy = central4(|s| self.components(x, s), y, hy)?;
        Ok(ForceSample {
            fx,
            fy,
            fx_x: dx.0,
            fx_y: dy.0,
            fy_x: dx.1,
            fy_y: dy.1,
        })
    }

    /// Potential `V` with `force = -grad V`, when the model has one.
    fn potential(&self, _x: f64, _y: f64) -> Option<Result<f64, ForceError>> {
        None
    }
}

/// Fourth-order central difference of a pair-valued function.
fn central4<F>(f: F, at: f64, h: f64) -> Result<(f64, f64), ForceError>
where
    F: Fn(f64) -> Result<(f64, f64), ForceError>,
{
    let (a2, b2) = f(at + 2.0 * h)?;
    let (a1, b1) = f(at + h)?;
    let (m1, n1) = f(at - h)?;
    let (m2, n2) = f(at - 2.0 * h)?;
    Ok((
        (-a2 + 8.0 * a1 - 8.0 * m1 + m2) / (12.0 * h),
        (-b2 + 8.0 * b1 - 8.0 * n1 + n2) / (12.0 * h),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Harmonic;
    impl PlanarForce for Harmonic {
        fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
            Ok((-x, -y))
        }
    }

    #[test]
    fn default_partials_are_accurate() {
        let s = Harmonic.with_partials(0.7, -1.2).unwrap();
        assert_relative_eq!(s.fx_x, -1.0, max_relative = 1e-9);
        assert_relative_eq!(s.fy_y, -1.0, max_relative = 1e-9);
        assert_relative_eq!(s.fx_y, 0.0, epsilon = 1e-9);
        assert_relative_eq!(s.curl(), 0.0, epsilon = 1e-9);
    }
}
