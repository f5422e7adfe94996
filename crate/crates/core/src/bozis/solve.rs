//! Force derivation for solvable families, residual verification of
//! candidate forces, and potential reconstruction.
//!
//! A solvable family determines the first force component through
//! `X_x = P X`, `X_y = Q X` with parameter-independent `P`, `Q`, so
//!
//! ```text
//! X(x, y) = X0 * exp( integral of P dx + Q dy along any path from the anchor )
//! Y(x, y) = rho(x, y) * X(x, y)
//! ```
//!
//! The gauge `X0` (the force scale at the anchor) is the one degree of
//! freedom orbit geometry cannot fix.  Integration runs along axis-aligned
//! legs (anchor -> (x, anchor.y) -> (x, y)) with adaptive quadrature;
//! `P_y = Q_x` guarantees path independence.

use super::classify::{Branch, CompatibilityVerdict, Tolerances};
use super::fields::{field_jets, CoefficientRoute, FieldError, FIELDS_ORDER, INTEGRABILITY_ORDER};
use crate::families::FamilySpec;
use crate::force::{ForceError, ForceSample, PlanarForce};

use crate::quad;
use crate::rk::{self, RkOptions};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("family is not solvable (verdict branch {branch})")]
    NotSolvable { branch: Branch },
    #[error("gauge constant X0 must be nonzero")]
    GaugeZero,
    #[error(
        "P or Q depends on the family parameter at ({x}, {y}): relative spread {spread:e} \
         exceeds {tolerance:e}"
    )]
    PQDependsOnB {
        x: f64,
        y: f64,
        spread: f64,
        tolerance: f64,
    },
    #[error(
        "integrability P_y = Q_x violated at ({x}, {y}): normalized residual {magnitude:e} \
         exceeds {tolerance:e}"
    )]
    IntegrabilityViolated {
        x: f64,
        y: f64,
        magnitude: f64,
        tolerance: f64,
    },
    #[error("too few grid points evaluable for solving ({surviving}/{total})")]
    GridTooSingular { surviving: usize, total: usize },
}

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("force is not conservative: max normalized |X_y - Y_x| = {residual:e}")]
    NotConservative { residual: f64 },
    #[error(transparent)]
    Force(#[from] ForceError),
    #[error("potential path integral failed: {0}")]
    Quadrature(String),
}

/// Log-derivative data of the candidate force at a point.
#[derive(Debug, Clone, Copy)]
pub struct PqSample {
    pub p: f64,
    pub q: f64,
    pub rho: f64,
    pub rho_x: f64,
    pub rho_y: f64,
}

type PqEval = dyn Fn(f64, f64) -> Result<PqSample, ForceError> + Send + Sync;
type UnitPotential = dyn Fn(f64, f64) -> Result<f64, ForceError> + Send + Sync;

/// A planar force defined through its log-derivative fields, anchored gauge,
/// and second component ratio `Y = rho X`.
pub struct ForceField {
    pq: Arc<PqEval>,
    pub anchor: (f64, f64),
    /// Gauge constant: the value of X at the anchor.
    pub gauge: f64,
    quad_tol: f64,
    /// Max normalized |X_y - Y_x| sampled over the derivation grid.
    pub conservativity_residual: f64,
    /// Max normalized |x Y - y X| sampled over the derivation grid.
    pub centrality_residual: f64,
    unit_potential: Option<Arc<UnitPotential>>,
}

impl std::fmt::Debug for ForceField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForceField")
            .field("anchor", &self.anchor)
            .field("gauge", &self.gauge)
            .field("conservativity_residual", &self.conservativity_residual)
            .field("centrality_residual", &self.centrality_residual)
            .finish()
    }
}

impl ForceField {
    /// Builds a force field directly from log-derivative data; used by the
    /// solver and by manufactured test fixtures.
    pub fn from_log_derivatives<F>(pq: F, anchor: (f64, f64), gauge: f64, quad_tol: f64) -> ForceField
    where
        F: Fn(f64, f64) -> Result<PqSample, ForceError> + Send + Sync + 'static,
    {
        ForceField {
            pq: Arc::new(pq),
            anchor,
            gauge,
            quad_tol,
            conservativity_residual: f64::NAN,
            centrality_residual: f64::NAN,
            unit_potential: None,
        }
    }

    pub fn pq_at(&self, x: f64, y: f64) -> Result<PqSample, ForceError> {
        (self.pq)(x, y)
    }

    /// X at unit gauge: `exp` of the path integral of (P, Q) from the
    /// anchor along axis-aligned legs.
    pub fn unit_x(&self, x: f64, y: f64) -> Result<f64, ForceError> {
        let (ax, ay) = self.anchor;
        let leg_x = quad::adaptive(
            &|s: f64| self.pq_at(s, ay).map(|pq| pq.p).map_err(|e| e.to_string()),
            ax,
            x,
            self.quad_tol,
        )
        .map_err(|e| ForceError::Eval(e.to_string()))?;
        let leg_y = quad::adaptive(
            &|s: f64| self.pq_at(x, s).map(|pq| pq.q).map_err(|e| e.to_string()),
            ay,
            y,
            self.quad_tol,
        )
        .map_err(|e| ForceError::Eval(e.to_string()))?;
        Ok((leg_x + leg_y).exp())
    }

    /// Attaches a potential evaluator integrated alongside the force
    /// (`dV = -(X dx + Y dy)` down the same axis-aligned legs, with the
    /// log-integral carried as a companion state so each leg is one ODE
    /// solve instead of nested quadrature).
    pub fn attach_potential(&mut self) {
        let pq = Arc::clone(&self.pq);
        let anchor = self.anchor;
        let tol = self.quad_tol;
        self.unit_potential = Some(Arc::new(move |x: f64, y: f64| {
            let (ax, ay) = anchor;
            let opts = RkOptions {
                rel_tol: tol.max(1e-13),
                abs_tol: tol.max(1e-13),
                max_steps: 2_000_000,
                initial_step: None,
            };
            // x-leg: state = [log X/X0, V/X0]
            let rhs_x = |s: f64, st: &[f64; 2]| -> Result<[f64; 2], String> {
                let pqs = pq(s, ay).map_err(|e| e.to_string())?;
                Ok([pqs.p, -st[0].exp()])
            };
            let after_x = rk::integrate(rhs_x, ax, [0.0, 0.0], x, &opts, |_| {})
                .map_err(|e| ForceError::Eval(e.to_string()))?;
            let rhs_y = |s: f64, st: &[f64; 2]| -> Result<[f64; 2], String> {
                let pqs = pq(x, s).map_err(|e| e.to_string())?;
                Ok([pqs.q, -pqs.rho * st[0].exp()])
            };
            let after_y = rk::integrate(rhs_y, ay, [after_x[0], after_x[1]], y, &opts, |_| {})
                .map_err(|e| ForceError::Eval(e.to_string()))?;
            Ok(after_y[1])
        }));
    }
}

impl PlanarForce for ForceField {
    fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
        let ux = self.unit_x(x, y)?;
        let pq = self.pq_at(x, y)?;
        let fx = self.gauge * ux;
        Ok((fx, pq.rho * fx))
    }

    /// Partials follow from the defining relations `X_x = P X`, `X_y = Q X`
    /// and `Y = rho X` exactly, with a single path integration.
    fn with_partials(&self, x: f64, y: f64) -> Result<ForceSample, ForceError> {
        let ux = self.unit_x(x, y)?;
        let pq = self.pq_at(x, y)?;
        let fx = self.gauge * ux;
        let fy = pq.rho * fx;
        let fx_x = pq.p * fx;
        let fx_y = pq.q * fx;
        Ok(ForceSample {
            fx,
            fy,
            fx_x,
            fx_y,
            fy_x: pq.rho_x * fx + pq.rho * fx_x,
            fy_y: pq.rho_y * fx + pq.rho * fx_y,
        })
    }

    fn potential(&self, x: f64, y: f64) -> Option<Result<f64, ForceError>> {
        self.unit_potential
            .as_ref()
            .map(|up| up(x, y).map(|v| self.gauge * v))
    }
}

/// Evaluates the log-derivative fields of the candidate force for a family
/// at a fixed parameter value.
pub fn pq_sample(
    spec: &FamilySpec,
    x: f64,
    y: f64,
    param: f64,
) -> Result<PqSample, FieldError> {
    let jets = field_jets(spec, x, y, param, FIELDS_ORDER, CoefficientRoute::Generic)?;
    let rho = jets
        .rho
        .as_ref()
        .ok_or(FieldError::FloorTriggered { quantity: "rho" })?;
    let p = jets
        .p
        .as_ref()
        .ok_or(FieldError::FloorTriggered { quantity: "P" })?;
    let q = jets
        .q
        .as_ref()
        .ok_or(FieldError::FloorTriggered { quantity: "Q" })?;
    Ok(PqSample {
        p: p.value(),
        q: q.value(),
        rho: rho.value(),
        rho_x: rho.partial(1, 0, 0)?,
        rho_y: rho.partial(0, 1, 0)?,
    })
}

/// Solves for the force generating a `Solvable` family.
///
/// Checks that P and Q are independent of the family parameter (max
/// relative spread over the samples below `tol.b_independence`), that the
/// integrability residual stays below `tol.integrability_max`, then builds
/// the anchored exponential field with `X(anchor) = x0` and fills the
/// conservativity/centrality diagnostics by sampling the grid.
pub fn solve_force(
    spec: &FamilySpec,
    verdict: &CompatibilityVerdict,
    grid: &[(f64, f64)],
    b_samples: &[f64],
    tol: &Tolerances,
    anchor: (f64, f64),
    x0: f64,
) -> Result<ForceField, SolveError> {
    if verdict.branch != Branch::Solvable {
        return Err(SolveError::NotSolvable {
            branch: verdict.branch,
        });
    }
    if x0 == 0.0 {
        return Err(SolveError::GaugeZero);
    }
    let b_ref = b_samples[b_samples.len() / 2];

    // parameter independence of P and Q across all samples
    let mut surviving = 0usize;
    for &(x, y) in grid {
        let mut ps = Vec::with_capacity(b_samples.len());
        let mut qs = Vec::with_capacity(b_samples.len());
        for &b in b_samples {
            if let Ok(s) = pq_sample(spec, x, y, b) {
                ps.push(s.p);
                qs.push(s.q);
            }
        }
        if ps.len() < 2 {
            continue;
        }
        surviving += 1;
        for vals in [&ps, &qs] {
            let max = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12);
            let spread = (max - min) / scale;
            if spread > tol.b_independence {
                return Err(SolveError::PQDependsOnB {
                    x,
                    y,
                    spread,
                    tolerance: tol.b_independence,
                });
            }
        }
    }
    if (surviving as f64) < tol.min_surviving_fraction * grid.len() as f64 {
        return Err(SolveError::GridTooSingular {
            surviving,
            total: grid.len(),
        });
    }

    // integrability on the grid at the reference parameter
    for &(x, y) in grid {
        if let Ok(jets) = field_jets(spec, x, y, b_ref, INTEGRABILITY_ORDER, CoefficientRoute::Generic) {
            if let (Some(p), Some(q)) = (&jets.p, &jets.q) {
                let p_y = p.partial(0, 1, 0).unwrap_or(f64::NAN);
                let q_x = q.partial(1, 0, 0).unwrap_or(f64::NAN);
                let denom = p_y.abs() + q_x.abs() + f64::EPSILON;
                let magnitude = (p_y - q_x).abs() / denom;
                if magnitude.is_finite() && magnitude > tol.integrability_max {
                    return Err(SolveError::IntegrabilityViolated {
                        x,
                        y,
                        magnitude,
                        tolerance: tol.integrability_max,
                    });
                }
            }
        }
    }

    let spec_owned = spec.clone();
    let pq = move |x: f64, y: f64| -> Result<PqSample, ForceError> {
        pq_sample(&spec_owned, x, y, b_ref).map_err(|e| ForceError::Eval(e.to_string()))
    };
    let mut field = ForceField::from_log_derivatives(pq, anchor, x0, tol.quadrature_abs);

    // diagnostics sampled over the grid (scale-free, so gauge never matters)
    let mut cons: f64 = 0.0;
    let mut cent: f64 = 0.0;
    for &(x, y) in grid {
        if let Ok(s) = field.with_partials(x, y) {
            let cons_den = s.fx_y.abs() + s.fy_x.abs() + f64::EPSILON;
            cons = cons.max((s.fx_y - s.fy_x).abs() / cons_den);
            let cent_den = (x * s.fy).abs() + (y * s.fx).abs() + f64::EPSILON;
            cent = cent.max((x * s.fy - y * s.fx).abs() / cent_den);
        }
    }
    field.conservativity_residual = cons;
    field.centrality_residual = cent;
    if cons <= 1e-6 {
        field.attach_potential();
    }
    Ok(field)
}

/// Report of the force-vs-family first-order residual over a grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidualReport {
    pub max_normalized: f64,
    pub median_normalized: f64,
    /// (x, y, param) carrying the worst normalized residual.
    pub worst: (f64, f64, f64),
    pub evaluated: usize,
    pub dropped: usize,
    pub rows: Vec<ResidualRow>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidualRow {
    pub x: f64,
    pub y: f64,
    pub param: f64,
    pub residual: f64,
    pub normalized: f64,
}

/// Residual of the compatibility PDE for a candidate force:
///
/// ```text
/// R = -X_x + X_y/gamma - gamma Y_x + Y_y - lambda X - mu Y
/// ```
///
/// per grid point per parameter sample, normalized by
/// `|lambda X| + |mu Y| + eps`.
pub fn check_force_against_family(
    spec: &FamilySpec,
    force: &dyn PlanarForce,
    grid: &[(f64, f64)],
    b_samples: &[f64],
) -> ResidualReport {
    let mut rows = Vec::new();
    let mut dropped = 0usize;
    for &b in b_samples {
        for &(x, y) in grid {
            let coeffs = match super::fields::coefficient_values(spec, x, y, b) {
                Ok(c) => c,
                Err(_) => {
                    dropped += 1;
                    continue;
                }
            };
            let (gamma, lambda, mu) = coeffs;
            let s = match force.with_partials(x, y) {
                Ok(s) => s,
                Err(_) => {
                    dropped += 1;
                    continue;
                }
            };
            let residual = -s.fx_x + s.fx_y / gamma - gamma * s.fy_x + s.fy_y
                - lambda * s.fx
                - mu * s.fy;
            let normalized =
                residual.abs() / ((lambda * s.fx).abs() + (mu * s.fy).abs() + f64::EPSILON);
            rows.push(ResidualRow {
                x,
                y,
                param: b,
                residual,
                normalized,
            });
        }
    }
    let mut sorted: Vec<f64> = rows.iter().map(|r| r.normalized).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_normalized = sorted.last().copied().unwrap_or(f64::NAN);
    let median_normalized = if sorted.is_empty() {
        f64::NAN
    } else if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    let worst = rows
        .iter()
        .max_by(|a, b| a.normalized.partial_cmp(&b.normalized).unwrap())
        .map(|r| (r.x, r.y, r.param))
        .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    ResidualReport {
        max_normalized,
        median_normalized,
        worst,
        evaluated: rows.len(),
        dropped,
        rows,
    }
}

/// Potential evaluator produced by [`reconstruct_potential`].
pub struct PotentialField {
    pub anchor: (f64, f64),
    pub conservativity_residual: f64,
    eval: Arc<UnitPotential>,
}

impl PotentialField {
    /// `V(x, y)` with `V(anchor) = 0` and `force = -grad V`.
    pub fn value(&self, x: f64, y: f64) -> Result<f64, ForceError> {
        (self.eval)(x, y)
    }
}

/// Reconstructs `V(x, y) = -(integral of X dx + Y dy)` from the anchor
/// along axis-aligned paths, after verifying `X_y = Y_x` on the grid
/// (max normalized curl below `cons_tol`).
pub fn reconstruct_potential<F>(
    force: Arc<F>,
    anchor: (f64, f64),
    grid: &[(f64, f64)],
    quad_tol: f64,
    cons_tol: f64,
) -> Result<PotentialField, PotentialError>
where
    F: PlanarForce + Send + Sync + 'static,
{
    let mut residual: f64 = 0.0;
    for &(x, y) in grid {
        let s = force.with_partials(x, y)?;
        let denom = s.fx_y.abs() + s.fy_x.abs() + s.fx.abs() + s.fy.abs() + f64::EPSILON;
        residual = residual.max(s.curl().abs() / denom);
    }
    if residual > cons_tol {
        return Err(PotentialError::NotConservative { residual });
    }
    let f = Arc::clone(&force);
    let eval: Arc<UnitPotential> = Arc::new(move |x: f64, y: f64| {
        let (ax, ay) = anchor;
        let leg_x = quad::adaptive(
            &|s: f64| f.components(s, ay).map(|c| c.0).map_err(|e| e.to_string()),
            ax,
            x,
            quad_tol,
        )
        .map_err(|e| ForceError::Eval(e.to_string()))?;
        let leg_y = quad::adaptive(
            &|s: f64| f.components(x, s).map(|c| c.1).map_err(|e| e.to_string()),
            ay,
            y,
            quad_tol,
        )
        .map_err(|e| ForceError::Eval(e.to_string()))?;
        Ok(-(leg_x + leg_y))
    });
    Ok(PotentialField {
        anchor,
        conservativity_residual: residual,
        eval,
    })
}
