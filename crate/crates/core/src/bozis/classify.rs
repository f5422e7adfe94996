//! Grid classification of a family against autonomous force fields.
//!
//! The admissibility of a parameter-independent force is governed by the
//! functions `L`, `M` and their parameter derivatives.  On a grid of
//! evaluation points crossed with parameter samples the cascade is:
//!
//! 1. `gamma_b ~ 0` everywhere: the parameter never alters member shapes
//!    (a relabelled one-parameter family) — `Degenerate`;
//! 2. `lambda_b ~ 0` and `mu_b ~ 0` everywhere: the PDE coefficients are
//!    parameter-free, the constraint degenerates to a single first-order
//!    PDE with a function's worth of solutions — `BIndependentPDE`
//!    (reported, not solved);
//! 3. `L_b`, `M_b`, `(L/M)_b` all bounded away from zero AND
//!    `(L_b/M_b)_b ~ 0` AND `P_y = Q_x` within tolerance — `Solvable`;
//! 4. the three nonzero conditions hold but an equality condition fails
//!    decisively — `NoForce`;
//! 5. a nonzero condition degenerates in a pattern other than case 2 —
//!    `Unclassified` (a genuine case of the underlying theory this tool
//!    does not resolve);
//! 6. anything marginal — `Indeterminate`, never a guess.
//!
//! Zero/nonzero decisions use normalized magnitudes: a quantity is
//! "identically zero" when `max |q| <= tol_zero * S` and "bounded away from
//! zero" when `min |q| >= tol_nonzero * S`, where `S` is the median of the
//! quantity's natural comparison scale (for a parameter derivative `q_b`,
//! the median of `|q|` divided by the parameter-sample spread).  The
//! published conditions are exact-arithmetic statements; this is their
//! declared numerical realization.

use super::fields::{extract_fields, field_jets, BozisFields, CoefficientRoute, INTEGRABILITY_ORDER};
use crate::families::FamilySpec;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("empty evaluation grid or parameter sample set")]
    EmptyGrid,
    #[error("too many singular grid points: {surviving}/{total} survived (need {required})")]
    TooManySingularPoints {
        surviving: usize,
        total: usize,
        required: usize,
    },
}

/// Numerical decision thresholds for the pipeline.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Normalized magnitude below which a grid quantity counts as
    /// identically zero.
    pub tol_zero: f64,
    /// Normalized magnitude above which it counts as bounded away from zero.
    pub tol_nonzero: f64,
    /// Maximum relative spread of P, Q across parameter samples accepted as
    /// parameter-independence.
    pub b_independence: f64,
    /// Absolute tolerance of the force-solving path quadrature.
    pub quadrature_abs: f64,
    /// Maximum normalized integrability residual accepted when solving.
    pub integrability_max: f64,
    /// Minimum fraction of (point, parameter) samples that must evaluate.
    pub min_surviving_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_zero: 1e-8,
            tol_nonzero: 1e-6,
            b_independence: 1e-7,
            quadrature_abs: 1e-10,
            integrability_max: 1e-6,
            min_surviving_fraction: 0.8,
        }
    }
}

/// Classification outcome branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Degenerate,
    BIndependentPDE,
    Solvable,
    NoForce,
    Unclassified,
    Indeterminate,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Branch::Degenerate => "Degenerate",
            Branch::BIndependentPDE => "BIndependentPDE",
            Branch::Solvable => "Solvable",
            Branch::NoForce => "NoForce",
            Branch::Unclassified => "Unclassified",
            Branch::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

/// Grid decision for one condition quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ZeroDecision {
    Zero,
    NonZero,
    Marginal,
    /// No sample carried the quantity (blocked by upstream floors).
    Undefined,
}

/// Magnitude census of one condition quantity over the grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionEvidence {
    pub name: String,
    pub samples: usize,
    pub min_abs: f64,
    pub median_abs: f64,
    pub max_abs: f64,
    /// Natural comparison scale the thresholds multiply.
    pub scale: f64,
    pub normalized_min: f64,
    pub normalized_max: f64,
    pub decision: ZeroDecision,
}

/// How many (point, parameter) samples failed, and why.
#[derive(Debug, Clone, Serialize)]
pub struct ExclusionCensus {
    pub total: usize,
    pub surviving: usize,
    pub dropped_by_reason: std::collections::BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityVerdict {
    pub branch: Branch,
    pub evidence: Vec<ConditionEvidence>,
    pub census: ExclusionCensus,
    pub tolerances: Tolerances,
    /// Family-jet order used for the sweep.
    pub order: usize,
    pub narrative: String,
}

impl CompatibilityVerdict {
    pub fn evidence_named(&self, name: &str) -> Option<&ConditionEvidence> {
        self.evidence.iter().find(|e| e.name == name)
    }
}

/// One grid evaluation: the field record, or the reason it was dropped.
#[derive(Debug, Clone, Serialize)]
pub struct SampleRecord {
    pub x: f64,
    pub y: f64,
    pub param: f64,
    pub status: String,
    pub fields: Option<BozisFields>,
}

/// Classification plus the raw per-sample records behind it.
#[derive(Debug)]
pub struct ClassifyOutcome {
    pub verdict: CompatibilityVerdict,
    pub samples: Vec<SampleRecord>,
}

fn median(sorted: &[f64]) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn median_abs_of<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut v: Vec<f64> = values.filter(|x| x.is_finite()).map(f64::abs).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    median(&v)
}

fn build_evidence(name: &str, values: &[f64], scale: f64, tol: &Tolerances) -> ConditionEvidence {
    let mut mags: Vec<f64> = values.iter().filter(|v| v.is_finite()).map(|v| v.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if mags.is_empty() {
        return ConditionEvidence {
            name: name.to_string(),
            samples: 0,
            min_abs: f64::NAN,
            median_abs: f64::NAN,
            max_abs: f64::NAN,
            scale,
            normalized_min: f64::NAN,
            normalized_max: f64::NAN,
            decision: ZeroDecision::Undefined,
        };
    }
    let scale = scale.max(f64::MIN_POSITIVE);
    let (min_abs, max_abs) = (mags[0], *mags.last().unwrap());
    let decision = if max_abs <= tol.tol_zero * scale {
        ZeroDecision::Zero
    } else if min_abs >= tol.tol_nonzero * scale {
        ZeroDecision::NonZero
    } else {
        ZeroDecision::Marginal
    };
    ConditionEvidence {
        name: name.to_string(),
        samples: mags.len(),
        min_abs,
        median_abs: median(&mags),
        max_abs,
        scale,
        normalized_min: min_abs / scale,
        normalized_max: max_abs / scale,
        decision,
    }
}

/// Spread of the parameter samples, the length scale dividing parameter
/// derivatives' comparison scales.
fn param_spread(b_samples: &[f64]) -> f64 {
    let min = b_samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = b_samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = max - min;
    if spread > 1e-300 {
        spread
    } else {
        median_abs_of(b_samples.iter().cloned()).max(1.0)
    }
}

/// Sweeps the grid at every parameter sample and classifies the family.
pub fn classify(
    spec: &FamilySpec,
    grid: &[(f64, f64)],
    b_samples: &[f64],
    tol: &Tolerances,
    order: usize,
) -> Result<ClassifyOutcome, ClassifyError> {
    if grid.is_empty() || b_samples.is_empty() {
        return Err(ClassifyError::EmptyGrid);
    }
    // The integrability residual differentiates P once more, so the sweep
    // always carries at least order 7.
    let order = order.max(INTEGRABILITY_ORDER);

    let mut samples = Vec::with_capacity(grid.len() * b_samples.len());
    let mut dropped_by_reason = std::collections::BTreeMap::new();
    for &b in b_samples {
        for &(x, y) in grid {
            let record = match field_jets(spec, x, y, b, order, CoefficientRoute::Generic)
                .and_then(|jets| extract_fields(x, y, b, &jets))
            {
                Ok(fields) => SampleRecord {
                    x,
                    y,
                    param: b,
                    status: "ok".to_string(),
                    fields: Some(fields),
                },
                Err(err) => {
                    let reason = short_reason(&err);
                    *dropped_by_reason.entry(reason.clone()).or_insert(0usize) += 1;
                    SampleRecord {
                        x,
                        y,
                        param: b,
                        status: reason,
                        fields: None,
                    }
                }
            };
            samples.push(record);
        }
    }

    let total = samples.len();
    let surviving = samples.iter().filter(|s| s.fields.is_some()).count();
    let required = (tol.min_surviving_fraction * total as f64).ceil() as usize;
    let census = ExclusionCensus {
        total,
        surviving,
        dropped_by_reason,
    };
    if surviving < required {
        return Err(ClassifyError::TooManySingularPoints {
            surviving,
            total,
            required,
        });
    }

    let ok = || samples.iter().filter_map(|s| s.fields.as_ref());
    let bs = param_spread(b_samples);

    let scale_over_spread = |f: &dyn Fn(&BozisFields) -> f64| median_abs_of(ok().map(f)) / bs;

    let evidence = vec![
        build_evidence(
            "gamma_b",
            &ok().map(|f| f.gamma_b).collect::<Vec<_>>(),
            scale_over_spread(&|f| f.gamma),
            tol,
        ),
        build_evidence(
            "lambda_b",
            &ok().map(|f| f.lambda_b).collect::<Vec<_>>(),
            scale_over_spread(&|f| f.lambda),
            tol,
        ),
        build_evidence(
            "mu_b",
            &ok().map(|f| f.mu_b).collect::<Vec<_>>(),
            scale_over_spread(&|f| f.mu),
            tol,
        ),
        build_evidence(
            "l_b",
            &ok().map(|f| f.l_b).collect::<Vec<_>>(),
            scale_over_spread(&|f| f.l),
            tol,
        ),
        build_evidence(
            "m_b",
            &ok().map(|f| f.m_b).collect::<Vec<_>>(),
            scale_over_spread(&|f| f.m),
            tol,
        ),
        build_evidence(
            "lm_ratio_b",
            &ok().map(|f| f.lm_ratio_b).collect::<Vec<_>>(),
            median_abs_of(ok().map(|f| f.l / f.m)) / bs,
            tol,
        ),
        build_evidence(
            "rho_b",
            &ok().map(|f| f.rho_b).collect::<Vec<_>>(),
            scale_over_spread(&|f| f.rho),
            tol,
        ),
        build_evidence(
            "integrability",
            &ok().map(|f| f.integrability_residual()).collect::<Vec<_>>(),
            median_abs_of(ok().map(|f| f.p_y.abs() + f.q_x.abs())),
            tol,
        ),
    ];

    let decision = |name: &str| {
        evidence
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.decision)
            .unwrap_or(ZeroDecision::Undefined)
    };

    use ZeroDecision::*;
    let gamma_b = decision("gamma_b");
    let lambda_b = decision("lambda_b");
    let mu_b = decision("mu_b");
    let l_b = decision("l_b");
    let m_b = decision("m_b");
    let lm_ratio_b = decision("lm_ratio_b");
    let rho_b = decision("rho_b");
    let integ = decision("integrability");

    let (branch, narrative) = if gamma_b == Zero {
        (
            Branch::Degenerate,
            "the slope function does not respond to the parameter: the family is a \
             relabelled one-parameter family"
                .to_string(),
        )
    } else if lambda_b == Zero && mu_b == Zero {
        (
            Branch::BIndependentPDE,
            "the PDE coefficients lambda and mu are parameter-free; the constraint is a \
             single first-order PDE with a function's worth of force solutions (reported, \
             not solved)"
                .to_string(),
        )
    } else if l_b == NonZero && m_b == NonZero && lm_ratio_b == NonZero {
        if rho_b == Zero && integ == Zero {
            (
                Branch::Solvable,
                "L_b, M_b, (L/M)_b are bounded away from zero while (L_b/M_b)_b and the \
                 integrability residual vanish: a unique force (up to scale) exists"
                    .to_string(),
            )
        } else if rho_b == NonZero || integ == NonZero {
            let which = if rho_b == NonZero {
                "(L_b/M_b)_b is decisively nonzero"
            } else {
                "the integrability residual is decisively nonzero"
            };
            (
                Branch::NoForce,
                format!(
                    "L_b, M_b, (L/M)_b are bounded away from zero but {which}: no autonomous \
                     force generates this family"
                ),
            )
        } else {
            (
                Branch::Indeterminate,
                "the nonzero conditions hold but the equality conditions are numerically \
                 marginal"
                    .to_string(),
            )
        }
    } else if l_b == Zero || m_b == Zero || lm_ratio_b == Zero {
        (
            Branch::Unclassified,
            "a nonzero condition degenerates outside the recognized patterns; the case \
             belongs to the wider theory and is not resolved here"
                .to_string(),
        )
    } else {
        (
            Branch::Indeterminate,
            "grid magnitudes sit between the zero and nonzero thresholds".to_string(),
        )
    };

    let verdict = CompatibilityVerdict {
        branch,
        evidence,
        census,
        tolerances: tol.clone(),
        order,
        narrative,
    };
    Ok(ClassifyOutcome { verdict, samples })
}

fn short_reason(err: &super::fields::FieldError) -> String {
    use super::fields::FieldError::*;
    match err {
        FxNearZero { .. } => "fx_near_zero".to_string(),
        GammaZero { .. } => "gamma_zero".to_string(),
        GammaCapZero { .. } => "big_gamma_zero".to_string(),
        GammaBZero { .. } => "gamma_b_zero".to_string(),
        NotHomogeneous { .. } => "not_homogeneous".to_string(),
        FloorTriggered { quantity } => format!("floor_{quantity}"),
        Family(_) => "family_error".to_string(),
        Jet(_) => "jet_error".to_string(),
    }
}
