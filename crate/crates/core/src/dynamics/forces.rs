//! Central force models and the orbit-equation oracle that calibrates them.
//!
//! The Manev-type potential `V(r) = -alpha/r - beta/(2 r^2)` produces
//! precessing-conic orbits `r = p / (1 + e cos b(theta - theta0))`.
//! Substituting `u = 1/r` of that conic into the orbit (Binet) equation
//! `u'' + u = -F(1/u)/(h^2 u^2)` and matching coefficients fixes
//!
//! ```text
//! alpha = F0 b^2,    beta = F0 p (1 - b^2),    h^2 = F0 p
//! ```
//!
//! exactly (zero residual for every e and theta).  A `(1-b)^2` variant of
//! the quadratic coefficient circulates in print; it agrees at b = 1 but
//! fails the identity otherwise, so it is kept behind
//! [`ManevCoefficient::PublishedVariant`] for comparison runs and the
//! residual it leaves is part of the validation suite.

use crate::force::{ForceError, ForceSample, PlanarForce};
use serde::{Deserialize, Serialize};

/// Convention for the 1/r^2 potential coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ManevCoefficient {
    /// `beta = F0 p (1 - b^2)`: the value forced by the orbit equation.
    #[default]
    OrbitMatched,
    /// `beta = F0 p (1 - b)^2`: printed variant, kept for comparison.
    PublishedVariant,
}

/// Parameters of the Manev-type central force.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ManevParams {
    /// Force-scale constant (the gauge freedom of the orbit geometry).
    pub f0: f64,
    /// Semilatus rectum of the generated conics.
    pub p: f64,
    /// Precession factor (b = 1 is Newtonian).
    pub b: f64,
    #[serde(default)]
    pub coefficient: ManevCoefficient,
}

impl ManevParams {
    pub fn new(f0: f64, p: f64, b: f64) -> ManevParams {
        ManevParams {
            f0,
            p,
            b,
            coefficient: ManevCoefficient::OrbitMatched,
        }
    }

    /// 1/r potential coefficient.
    pub fn alpha(&self) -> f64 {
        self.f0 * self.b * self.b
    }

    /// 1/r^2 potential coefficient (times 2), per the selected convention.
    pub fn beta(&self) -> f64 {
        match self.coefficient {
            ManevCoefficient::OrbitMatched => self.f0 * self.p * (1.0 - self.b * self.b),
            ManevCoefficient::PublishedVariant => self.f0 * self.p * (1.0 - self.b) * (1.0 - self.b),
        }
    }

    /// Squared angular momentum of the matched conic members.
    pub fn h_squared(&self) -> f64 {
        self.f0 * self.p
    }

    /// `V(r) = -alpha/r - beta/(2 r^2)`.
    pub fn potential(&self, r: f64) -> f64 {
        -self.alpha() / r - self.beta() / (2.0 * r * r)
    }

    /// Signed radial force `F(r) = -dV/dr` (negative = attractive).
    pub fn radial_force(&self, r: f64) -> f64 {
        -(self.alpha() / (r * r) + self.beta() / (r * r * r))
    }
}

/// Planar force of the Manev-type potential.
#[derive(Debug, Clone, Copy)]
pub struct ManevForce {
    pub params: ManevParams,
}

impl ManevForce {
    pub fn new(params: ManevParams) -> ManevForce {
        ManevForce { params }
    }
}

impl PlanarForce for ManevForce {
    fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
        let r = (x * x + y * y).sqrt();
        if r == 0.0 {
            return Err(ForceError::OriginSingularity);
        }
        let fr_over_r = self.params.radial_force(r) / r;
        Ok((fr_over_r * x, fr_over_r * y))
    }

    fn with_partials(&self, x: f64, y: f64) -> Result<ForceSample, ForceError> {
        let r2 = x * x + y * y;
        let r = r2.sqrt();
        if r == 0.0 {
            return Err(ForceError::OriginSingularity);
        }
        let (alpha, beta) = (self.params.alpha(), self.params.beta());
        let r3 = r2 * r;
        let r4 = r2 * r2;
        // X = -(alpha/r^3 + beta/r^4) x, Y likewise in y
        let g = alpha / r3 + beta / r4;
        let gp = 3.0 * alpha / (r4 * r) + 4.0 * beta / (r4 * r2);
        Ok(ForceSample {
            fx: -g * x,
            fy: -g * y,
            fx_x: -g + x * x * gp,
            fx_y: x * y * gp,
            fy_x: x * y * gp,
            fy_y: -g + y * y * gp,
        })
    }

    fn potential(&self, x: f64, y: f64) -> Option<Result<f64, ForceError>> {
        let r = (x * x + y * y).sqrt();
        if r == 0.0 {
            return Some(Err(ForceError::OriginSingularity));
        }
        Some(Ok(self.params.potential(r)))
    }
}

/// Pure inverse-square attraction of strength `f0` (the b = 1 case).
#[derive(Debug, Clone, Copy)]
pub struct NewtonianForce {
    pub f0: f64,
}

impl PlanarForce for NewtonianForce {
    fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
        ManevForce::new(ManevParams::new(self.f0, 1.0, 1.0)).components(x, y)
    }

    fn with_partials(&self, x: f64, y: f64) -> Result<ForceSample, ForceError> {
        ManevForce::new(ManevParams::new(self.f0, 1.0, 1.0)).with_partials(x, y)
    }

    fn potential(&self, x: f64, y: f64) -> Option<Result<f64, ForceError>> {
        let r = (x * x + y * y).sqrt();
        if r == 0.0 {
            return Some(Err(ForceError::OriginSingularity));
        }
        Some(Ok(-self.f0 / r))
    }
}

/// Force with components given by expression text in (x, y).
#[derive(Debug, Clone)]
pub struct ExpressionForce {
    x_ast: crate::exprlang::ExprAst,
    y_ast: crate::exprlang::ExprAst,
    constants: std::collections::BTreeMap<String, f64>,
}

impl ExpressionForce {
    pub fn new(
        x_text: &str,
        y_text: &str,
        constants: std::collections::BTreeMap<String, f64>,
    ) -> Result<ExpressionForce, String> {
        let x_ast = crate::exprlang::parse(x_text).map_err(|e| e.to_string())?;
        let y_ast = crate::exprlang::parse(y_text).map_err(|e| e.to_string())?;
        for ast in [&x_ast, &y_ast] {
            if ast.uses_var(crate::jets::Var::B) {
                return Err("force expressions may only use x and y".to_string());
            }
        }
        Ok(ExpressionForce {
            x_ast,
            y_ast,
            constants,
        })
    }
}

impl PlanarForce for ExpressionForce {
    fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
        let fx = self
            .x_ast
            .eval_f64(x, y, 0.0, &self.constants)
            .map_err(|e| ForceError::Eval(e.to_string()))?;
        let fy = self
            .y_ast
            .eval_f64(x, y, 0.0, &self.constants)
            .map_err(|e| ForceError::Eval(e.to_string()))?;
        Ok((fx, fy))
    }

    fn with_partials(&self, x: f64, y: f64) -> Result<ForceSample, ForceError> {
        let jx = self
            .x_ast
            .eval_jet(x, y, 0.0, 1, &self.constants)
            .map_err(|e| ForceError::Eval(e.to_string()))?;
        let jy = self
            .y_ast
            .eval_jet(x, y, 0.0, 1, &self.constants)
            .map_err(|e| ForceError::Eval(e.to_string()))?;
        let part = |j: &crate::jets::Jet, i, k| j.partial(i, k, 0).unwrap_or(f64::NAN);
        Ok(ForceSample {
            fx: jx.value(),
            fy: jy.value(),
            fx_x: part(&jx, 1, 0),
            fx_y: part(&jx, 0, 1),
            fy_x: part(&jy, 1, 0),
            fy_y: part(&jy, 0, 1),
        })
    }
}

/// Maximum absolute orbit-equation residual of the conic
/// `u = (1 + e cos b(theta - theta0))/p` under the given force parameters:
///
/// ```text
/// residual(theta) = u'' + u + F(1/u) / (h^2 u^2)
/// ```
///
/// Zero (to rounding) exactly when the potential coefficients match the
/// conic; this is the oracle that fixes `beta` and `h^2 = F0 p`.
pub fn binet_residual(
    params: &ManevParams,
    e: f64,
    theta0: f64,
    h: f64,
    theta_samples: &[f64],
) -> f64 {
    let p = params.p;
    let mut worst: f64 = 0.0;
    for &theta in theta_samples {
        let c = (params.b * (theta - theta0)).cos();
        let u = (1.0 + e * c) / p;
        let upp = -e * params.b * params.b * c / p;
        let r = 1.0 / u;
        let residual = upp + u + params.radial_force(r) / (h * h * u * u);
        worst = worst.max(residual.abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn newtonian_limit_at_b_one() {
        let params = ManevParams::new(1.0, 1.4, 1.0);
        assert_eq!(params.beta(), 0.0);
        let force = ManevForce::new(params);
        let (fx, fy) = force.components(0.6, 0.8).unwrap();
        // r = 1: pure inverse square pulls with magnitude f0
        assert_relative_eq!(fx, -0.6, max_relative = 1e-14);
        assert_relative_eq!(fy, -0.8, max_relative = 1e-14);
    }

    #[test]
    fn manev_force_is_central_to_machine_precision() {
        let force = ManevForce::new(ManevParams::new(1.0, 1.0, 1.2));
        for (x, y) in [(1.0, 0.3), (-0.4, 1.1), (0.2, -2.0)] {
            let (fx, fy) = force.components(x, y).unwrap();
            let scale = (x * fy).abs() + (y * fx).abs();
            assert!((x * fy - y * fx).abs() <= f64::EPSILON * scale);
        }
    }

    #[test]
    fn magnitude_at_unit_radius() {
        // |F(1)| = alpha + beta = b^2 + p(1-b^2); with p=1 that is exactly 1
        let params = ManevParams::new(1.0, 1.0, 1.2);
        assert_relative_eq!(params.radial_force(1.0), -1.0, max_relative = 1e-14);
    }

    #[test]
    fn manev_partials_match_finite_differences() {
        let force = ManevForce::new(ManevParams::new(1.3, 0.9, 1.4));
        let exact = force.with_partials(0.8, -0.5).unwrap();
        let fd = PlanarForce::with_partials(
            &ForceNoOverride(force),
            0.8,
            -0.5,
        )
        .unwrap();
        assert_relative_eq!(exact.fx_x, fd.fx_x, max_relative = 1e-8);
        assert_relative_eq!(exact.fx_y, fd.fx_y, max_relative = 1e-8);
        assert_relative_eq!(exact.fy_y, fd.fy_y, max_relative = 1e-8);
    }

    /// Wrapper that hides the exact partials so the trait default applies.
    struct ForceNoOverride(ManevForce);
    impl PlanarForce for ForceNoOverride {
        fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
            self.0.components(x, y)
        }
    }

    #[test]
    fn binet_identity_for_matched_coefficients() {
        let thetas: Vec<f64> = (0..100).map(|i| i as f64 * 0.063).collect();
        // Kepler case
        let kepler = ManevParams::new(1.0, 1.0, 1.0);
        assert!(binet_residual(&kepler, 0.3, 0.0, 1.0, &thetas) < 1e-14);
        // precessing case with the matched quadratic coefficient
        let manev = ManevParams::new(1.0, 1.0, 1.2);
        let h = manev.h_squared().sqrt();
        assert!(binet_residual(&manev, 0.3, 0.0, h, &thetas) < 1e-14);
        // the printed variant leaves a visible residual away from b = 1
        let printed = ManevParams {
            coefficient: ManevCoefficient::PublishedVariant,
            ..manev
        };
        let bad = binet_residual(&printed, 0.3, 0.0, h, &thetas);
        assert!(bad > 1e-2, "expected a decisive residual, got {bad:e}");
    }

    #[test]
    fn expression_force_rejects_parameter_variable() {
        assert!(ExpressionForce::new("-x*b", "-y", Default::default()).is_err());
    }
}
