//! Orbit families and the closed-form slope oracle for precessing conics.
//!
//! A two-parametric family is a level set `f(x, y, w) = c` where `w` is the
//! in-equation parameter (always seeded as the third jet variable) and `c`
//! the family value.  Two precessing-conic families are built in, both tied
//! to the polar curve `r = p / (1 + e cos b(theta - theta0))`:
//!
//! - [`FamilyKind::PrecessingCartesian`]: `f = (x^2+y^2)(1 + e cos b(theta-theta0))^2`,
//!   parameter `b`, family value `p^2`, constants `e`, `theta0`;
//! - [`FamilyKind::PrecessingByEccentricity`]: `f = (p - r)/(r cos b(theta-theta0))`,
//!   parameter `theta0`, family value `e`, constants `p`, `b`;
//!
//! plus [`FamilyKind::Expression`] for user-supplied `f(x, y, b)` text.
//!
//! The analytic oracle exploits that the Cartesian precessing family is
//! homogeneous of degree one, so the slope function `gamma = f_y/f_x`
//! depends only on the polar angle and can be written in closed form:
//!
//! ```text
//! theta' = b (theta - theta0)
//! tan(omega) = b e sin(theta') / (1 + e cos(theta'))
//! gamma = tan(theta - omega)
//! ```
//!
//! together with closed forms for `dgamma/dz` and `d2gamma/dz2` in
//! `z = y/x`.  These provide an independent cross-check of the generic jet
//! pipeline.  All oracle angles use the `atan2` convention (`theta` in
//! `(-pi, pi]`); inputs are normalized accordingly.

use crate::exprlang::{self, EvalError, ExprAst};
use crate::jets::{Jet, JetError, Var};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Oracle evaluations are only attempted where `|cos theta|` and
/// `|cos(theta-omega)|` clear this floor; grid builders use it to stay off
/// the closed forms' singular lines.
pub const ORACLE_COS_FLOOR: f64 = 0.05;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("family undefined at the coordinate origin")]
    OriginSingularity,
    #[error("unbounded conic branch: 1 + e cos b(theta-theta0) = {denominator:e} <= 0")]
    UnboundedBranch { denominator: f64 },
    #[error("oracle singular: {denominator} vanishes (|value| = {value:e})")]
    OracleSingularity {
        denominator: &'static str,
        value: f64,
    },
    #[error("invalid family constants: {0}")]
    InvalidConstants(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Which built-in form (or user expression) defines the family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FamilyKind {
    PrecessingCartesian { e: f64, theta0: f64 },
    PrecessingByEccentricity { p: f64, b: f64 },
    Expression {
        text: String,
        #[serde(skip)]
        ast: Option<ExprAst>,
        constants: BTreeMap<String, f64>,
    },
}

/// A family definition: the defining form plus a human-readable note.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub description: String,
}

impl FamilySpec {
    pub fn precessing_cartesian(e: f64, theta0: f64) -> Result<FamilySpec, FamilyError> {
        if !(0.0..1.0).contains(&e) {
            return Err(FamilyError::InvalidConstants(format!(
                "eccentricity e = {e} outside [0, 1)"
            )));
        }
        Ok(FamilySpec {
            kind: FamilyKind::PrecessingCartesian { e, theta0 },
            description: format!(
                "precessing conics (x^2+y^2)(1+{e}*cos(b*(theta-{theta0})))^2 = p^2, parameter b"
            ),
        })
    }

    pub fn by_eccentricity(p: f64, b: f64) -> Result<FamilySpec, FamilyError> {
        if p <= 0.0 || b <= 0.0 {
            return Err(FamilyError::InvalidConstants(format!(
                "need p > 0 and b > 0, got p = {p}, b = {b}"
            )));
        }
        Ok(FamilySpec {
            kind: FamilyKind::PrecessingByEccentricity { p, b },
            description: format!(
                "conics by eccentricity ({p}-r)/(r*cos({b}*(theta-w))) = e, parameter w"
            ),
        })
    }

    pub fn from_expression(
        text: &str,
        constants: BTreeMap<String, f64>,
    ) -> Result<FamilySpec, FamilyError> {
        let ast = exprlang::parse(text)
            .map_err(|e| FamilyError::InvalidConstants(format!("expression: {e}")))?;
        for name in ast.constant_names() {
            if !constants.contains_key(&name) {
                return Err(FamilyError::InvalidConstants(format!(
                    "constant `{name}` used in the expression is not bound"
                )));
            }
        }
        Ok(FamilySpec {
            kind: FamilyKind::Expression {
                text: text.to_string(),
                ast: Some(ast),
                constants,
            },
            description: format!("user family f(x,y,b) = {text}"),
        })
    }

    /// Jet of the family function at `(x, y)` with the in-equation parameter
    /// seeded as the third jet variable.
    pub fn family_value(
        &self,
        x: f64,
        y: f64,
        param: f64,
        order: usize,
    ) -> Result<Jet, FamilyError> {
        match &self.kind {
            FamilyKind::PrecessingCartesian { e, theta0 } => {
                if x == 0.0 && y == 0.0 {
                    return Err(FamilyError::OriginSingularity);
                }
                let xj = Jet::variable(Var::X, x, order);
                let yj = Jet::variable(Var::Y, y, order);
                let bj = Jet::variable(Var::B, param, order);
                let theta = Jet::atan2(&yj, &xj)?;
                let arg = &bj * &(&theta - &Jet::constant(*theta0, order));
                let shape = &Jet::constant(1.0, order) + &arg.cos().scaled(*e);
                let r2 = &(&xj * &xj) + &(&yj * &yj);
                Ok(&r2 * &(&shape * &shape))
            }
            FamilyKind::PrecessingByEccentricity { p, b } => {
                if x == 0.0 && y == 0.0 {
                    return Err(FamilyError::OriginSingularity);
                }
                let xj = Jet::variable(Var::X, x, order);
                let yj = Jet::variable(Var::Y, y, order);
                let wj = Jet::variable(Var::B, param, order);
                let theta = Jet::atan2(&yj, &xj)?;
                let r = (&(&xj * &xj) + &(&yj * &yj)).sqrt()?;
                let arg = (&theta - &wj).scaled(*b);
                let denom = &r * &arg.cos();
                Ok((&Jet::constant(*p, order) - &r).divide(&denom)?)
            }
            FamilyKind::Expression { ast, text, constants } => {
                let parsed;
                let ast = match ast {
                    Some(a) => a,
                    None => {
                        parsed = exprlang::parse(text)
                            .map_err(|e| FamilyError::InvalidConstants(e.to_string()))?;
                        &parsed
                    }
                };
                Ok(ast.eval_jet(x, y, param, order, constants)?)
            }
        }
    }
}

/// Point on the conic `r = p/(1 + e cos b(theta-theta0))` at polar angle
/// `theta`; errors on the unbounded branch where the denominator is not
/// positive.
pub fn orbit_point(
    p: f64,
    e: f64,
    b: f64,
    theta0: f64,
    theta: f64,
) -> Result<(f64, f64, f64), FamilyError> {
    let denominator = 1.0 + e * (b * (theta - theta0)).cos();
    if denominator <= 0.0 {
        return Err(FamilyError::UnboundedBranch { denominator });
    }
    let r = p / denominator;
    Ok((r * theta.cos(), r * theta.sin(), r))
}

/// Normalize to the `atan2` branch `(-pi, pi]` used by the family function.
fn principal(theta: f64) -> f64 {
    theta.sin().atan2(theta.cos())
}

/// Polar product grid `r x theta` in Cartesian coordinates, excluding rays
/// within the given floors of the coordinate axes (where the pipeline
/// formulas carry removable 1/x- and 1/y-type factors).
#[allow(clippy::too_many_arguments)]
pub fn polar_grid(
    r_min: f64,
    r_max: f64,
    r_count: usize,
    theta_min: f64,
    theta_max: f64,
    theta_count: usize,
    min_abs_cos: f64,
    min_abs_sin: f64,
) -> Vec<(f64, f64)> {
    let mut points = Vec::with_capacity(r_count * theta_count);
    for i in 0..r_count {
        let r = if r_count == 1 {
            r_min
        } else {
            r_min + (r_max - r_min) * i as f64 / (r_count - 1) as f64
        };
        for j in 0..theta_count {
            let theta = if theta_count == 1 {
                theta_min
            } else {
                theta_min + (theta_max - theta_min) * j as f64 / (theta_count - 1) as f64
            };
            if theta.cos().abs() < min_abs_cos || theta.sin().abs() < min_abs_sin {
                continue;
            }
            points.push((r * theta.cos(), r * theta.sin()));
        }
    }
    points
}

struct OraclePieces {
    theta: f64,
    thp: f64,
    omega: f64,
    /// 1 + e cos(theta')
    ecp: f64,
    cos_th: f64,
    cos_thm: f64,
}

fn oracle_pieces(e: f64, theta0: f64, b: f64, theta: f64) -> Result<OraclePieces, FamilyError> {
    let theta = principal(theta);
    let thp = b * (theta - theta0);
    let ecp = 1.0 + e * thp.cos();
    // continuous branch with omega(theta0) = 0: ecp > 0 keeps atan2 on it
    let omega = (b * e * thp.sin()).atan2(ecp);
    let cos_th = theta.cos();
    let cos_thm = (theta - omega).cos();
    if cos_th.abs() < 1e-12 {
        return Err(FamilyError::OracleSingularity {
            denominator: "cos(theta)",
            value: cos_th,
        });
    }
    if cos_thm.abs() < 1e-12 {
        return Err(FamilyError::OracleSingularity {
            denominator: "cos(theta-omega)",
            value: cos_thm,
        });
    }
    Ok(OraclePieces {
        theta,
        thp,
        omega,
        ecp,
        cos_th,
        cos_thm,
    })
}

/// Slope function `gamma = tan(theta - omega)` of the Cartesian precessing
/// family, with the apse-offset angle `omega` on the branch continuous in
/// `theta` and vanishing at `theta = theta0`.
pub fn analytic_gamma(e: f64, theta0: f64, b: f64, theta: f64) -> Result<f64, FamilyError> {
    let pc = oracle_pieces(e, theta0, b, theta)?;
    Ok((pc.theta - pc.omega).tan())
}

/// Closed-form `dgamma/dz` (`z = y/x`) for the Cartesian precessing family.
pub fn analytic_dgamma_dz(e: f64, theta0: f64, b: f64, theta: f64) -> Result<f64, FamilyError> {
    let pc = oracle_pieces(e, theta0, b, theta)?;
    let den = pc.cos_th * pc.ecp + e * b * pc.theta.sin() * pc.thp.sin();
    if den.abs() < 1e-12 {
        return Err(FamilyError::OracleSingularity {
            denominator: "cos(theta)(1+e cos theta') + e b sin(theta) sin(theta')",
            value: den,
        });
    }
    let k = 1.0 + e * (1.0 - b * b) * pc.thp.cos();
    Ok(pc.cos_th * pc.cos_th * pc.omega.cos() / pc.cos_thm * k / den)
}

/// Closed-form `d2gamma/dz2` for the Cartesian precessing family, obtained
/// by differentiating the `dgamma/dz` closed form once more in `theta`
/// (`d/dz = cos^2(theta) d/dtheta`):
///
/// ```text
/// Q^2   = (1 + e cos theta')^2 + (b e sin theta')^2
/// omega'= b^2 e (cos theta' + e) / Q^2
/// K     = 1 + e (1 - b^2) cos theta',   K' = -e (1 - b^2) b sin theta'
/// d2g/dz2 = cos^4(th) cos^2(om) / (cos^2(th-om) (1+e cos theta')) *
///           [ K (-2 tan th + 2 tan(th-om)(1-om') - 2 tan(om) om'
///               + e b sin theta'/(1+e cos theta')) + K' ]
/// ```
pub fn analytic_d2gamma_dz2(e: f64, theta0: f64, b: f64, theta: f64) -> Result<f64, FamilyError> {
    let pc = oracle_pieces(e, theta0, b, theta)?;
    let sin_thp = pc.thp.sin();
    let cos_thp = pc.thp.cos();
    let q2 = pc.ecp * pc.ecp + (b * e * sin_thp) * (b * e * sin_thp);
    let omega_prime = b * b * e * (cos_thp + e) / q2;
    let k = 1.0 + e * (1.0 - b * b) * cos_thp;
    let k_prime = -e * (1.0 - b * b) * b * sin_thp;
    let bracket = k
        * (-2.0 * pc.theta.tan() + 2.0 * (pc.theta - pc.omega).tan() * (1.0 - omega_prime)
            - 2.0 * pc.omega.tan() * omega_prime
            + e * b * sin_thp / pc.ecp)
        + k_prime;
    let c = pc.cos_th * pc.cos_th;
    let co = pc.omega.cos();
    Ok(c * c * co * co / (pc.cos_thm * pc.cos_thm * pc.ecp) * bracket)
}

/// The `d2gamma/dz2` closed form as published for this family
/// (`e b cos^3 th / cos(th-om) * (c3 b^3 + c2 b^2 + c1 b + c0) / den^2`).
/// It does not reproduce the true second derivative — the validation suite
/// measures and reports the discrepancy against [`analytic_d2gamma_dz2`].
pub fn analytic_d2gamma_dz2_published(
    e: f64,
    theta0: f64,
    b: f64,
    theta: f64,
) -> Result<f64, FamilyError> {
    let pc = oracle_pieces(e, theta0, b, theta)?;
    let den = pc.cos_th * pc.ecp + e * b * pc.theta.sin() * pc.thp.sin();
    if den.abs() < 1e-12 {
        return Err(FamilyError::OracleSingularity {
            denominator: "cos(theta)(1+e cos theta') + e b sin(theta) sin(theta')",
            value: den,
        });
    }
    let (sin_thp, cos_thp) = (pc.thp.sin(), pc.thp.cos());
    let (sin_2th, cos_om) = ((2.0 * pc.theta).sin(), pc.omega.cos());
    let c3 = e * cos_om * sin_2th;
    let c2 = e * sin_2th * cos_om + sin_thp * pc.cos_th * (pc.theta + pc.omega).cos();
    let c1 = -sin_2th * cos_om * (cos_thp + e);
    let c0 = -2.0 * cos_om * sin_thp * (e * cos_thp + 1.0);
    let poly = ((c3 * b + c2) * b + c1) * b + c0;
    Ok(e * b * pc.cos_th.powi(3) / pc.cos_thm * poly / (den * den))
}

/// Closed-form curvature field `Gamma = gamma gamma_x - gamma_y` of the
/// Cartesian precessing family at radius `r`, as published:
///
/// ```text
/// Gamma = -cos^2(om) / (r cos^2(th-om)) *
///         (1 + e cos th' - b^2 e cos th') / (cos th (1+e cos th') + b e sin th sin th')
/// ```
pub fn analytic_gamma_cap(
    e: f64,
    theta0: f64,
    b: f64,
    r: f64,
    theta: f64,
) -> Result<f64, FamilyError> {
    let pc = oracle_pieces(e, theta0, b, theta)?;
    if r <= 0.0 {
        return Err(FamilyError::OriginSingularity);
    }
    let den = pc.cos_th * pc.ecp + b * e * pc.theta.sin() * pc.thp.sin();
    if den.abs() < 1e-12 {
        return Err(FamilyError::OracleSingularity {
            denominator: "cos(theta)(1+e cos theta') + b e sin(theta) sin(theta')",
            value: den,
        });
    }
    let co = pc.omega.cos();
    let k = 1.0 + e * (1.0 - b * b) * pc.thp.cos();
    Ok(-co * co / (r * pc.cos_thm * pc.cos_thm) * k / den)
}
