//! Per-point field cascade: from the family jet to the slope function, the
//! PDE coefficients, and the parameter-elimination functions.
//!
//! All quantities are carried as jets so each level's partial derivatives
//! come out of the same evaluation:
//!
//! ```text
//! gamma = f_y / f_x                 slope data of the family member
//! Gamma = gamma gamma_x - gamma_y   curvature data
//! lambda = (-Gamma_x + Gamma_y/gamma) / Gamma
//! mu     = lambda gamma + 3 Gamma / gamma
//! L = -gamma^2 lambda_b / ((1+gamma^2) gamma_b)
//! M = -gamma^2 mu_b     / ((1+gamma^2) gamma_b)
//! rho = -L_b / M_b
//! D   = L M_b - M L_b
//! Q   = L + M rho                   ( = D/M_b )
//! P   = (Q - rho_x) / rho           ( = -D/L_b - rho_x/rho )
//! ```
//!
//! `P` and `Q` are the log-derivatives of any admissible first force
//! component (`X_x = P X`, `X_y = Q X`), so `P_y = Q_x` is the
//! integrability condition for solving them.  Each derivative level costs
//! one order of the family jet; the full record including `rho_x` needs
//! order 6 and the integrability residual `P_y - Q_x` needs order 7.

use crate::families::{FamilyError, FamilySpec};
use crate::jets::{Jet, JetError, Var, DIV_FLOOR};
use serde::Serialize;
use thiserror::Error;

/// Family-jet order delivering every [`BozisFields`] member.
pub const FIELDS_ORDER: usize = 6;

/// Family-jet order additionally delivering the integrability residual.
pub const INTEGRABILITY_ORDER: usize = 7;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("f_x near zero at the point (vertical family tangent, |f_x| = {value:e})")]
    FxNearZero { value: f64 },
    #[error("gamma near zero at the point (|gamma| = {value:e})")]
    GammaZero { value: f64 },
    #[error("Gamma near zero at the point (family locally straight, |Gamma| = {value:e})")]
    GammaCapZero { value: f64 },
    #[error("gamma_b near zero at the point (parameter locally inert, |gamma_b| = {value:e})")]
    GammaBZero { value: f64 },
    #[error("family is not positively homogeneous in (x, y): gamma shifts by {deviation:e} under scaling")]
    NotHomogeneous { deviation: f64 },
    #[error("{quantity} unavailable at the point: a division floor triggered upstream")]
    FloorTriggered { quantity: &'static str },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// Which algebraic route produces the PDE coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientRoute {
    /// Quotient cascade on the full jets.
    Generic,
    /// One-variable forms valid for (x, y)-homogeneous families, written in
    /// `gamma(z)`, `dgamma/dz`, `d2gamma/dz2` with `z = y/x`.  Serves as an
    /// independent cross-check of the generic route.
    Homogeneous,
}

/// Marks quantities whose divisor sat under the division floor; the
/// corresponding record entries are NaN.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SingularFlags {
    /// `|gamma_b|` under floor: L, M and everything deeper unavailable.
    pub gamma_b_floor: bool,
    /// `|M_b|` under floor: rho and everything deeper unavailable.
    pub m_b_floor: bool,
    /// `|M|` under floor: (L/M)_b unavailable.
    pub m_floor: bool,
    /// `|rho|` under floor: P unavailable.
    pub rho_floor: bool,
}

impl SingularFlags {
    pub fn any(&self) -> bool {
        self.gamma_b_floor || self.m_b_floor || self.m_floor || self.rho_floor
    }
}

/// Every scalar the classification consumes, evaluated at one
/// (point, parameter) pair.  Entries blocked by a division floor are NaN
/// with the corresponding flag set.
#[derive(Debug, Clone, Serialize)]
pub struct BozisFields {
    pub x: f64,
    pub y: f64,
    pub param: f64,
    pub gamma: f64,
    pub gamma_x: f64,
    pub gamma_y: f64,
    pub gamma_b: f64,
    pub big_gamma: f64,
    pub big_gamma_x: f64,
    pub big_gamma_y: f64,
    pub lambda: f64,
    pub mu: f64,
    pub lambda_b: f64,
    pub mu_b: f64,
    pub l: f64,
    pub m: f64,
    pub l_b: f64,
    pub m_b: f64,
    pub l_x: f64,
    pub l_y: f64,
    pub m_x: f64,
    pub m_y: f64,
    pub l_bx: f64,
    pub l_bb: f64,
    pub m_bb: f64,
    pub rho: f64,
    pub rho_x: f64,
    pub rho_y: f64,
    pub rho_b: f64,
    /// `D = L M_b - M L_b`.
    pub d: f64,
    /// `(L/M)_b`.
    pub lm_ratio_b: f64,
    /// Log-derivative fields of the candidate force; NaN below order 6.
    pub p: f64,
    pub q: f64,
    /// Integrability pair; NaN below order 7.
    pub p_y: f64,
    pub q_x: f64,
    pub flags: SingularFlags,
}

impl BozisFields {
    /// `P_y - Q_x`, the integrability residual (NaN below order 7).
    pub fn integrability_residual(&self) -> f64 {
        self.p_y - self.q_x
    }
}

/// The jet-valued cascade; higher layers read values and partials off it.
pub(crate) struct FieldJets {
    pub f: Jet,
    pub gamma: Jet,
    pub gamma_b: Jet,
    pub big_gamma: Jet,
    pub lambda: Jet,
    pub mu: Jet,
    pub l: Option<Jet>,
    pub m: Option<Jet>,
    pub l_b: Option<Jet>,
    pub m_b: Option<Jet>,
    pub rho: Option<Jet>,
    pub d: Option<Jet>,
    pub lm_ratio: Option<Jet>,
    pub q: Option<Jet>,
    pub p: Option<Jet>,
    pub flags: SingularFlags,
}

pub(crate) fn field_jets(
    spec: &FamilySpec,
    x: f64,
    y: f64,
    param: f64,
    order: usize,
    route: CoefficientRoute,
) -> Result<FieldJets, FieldError> {
    let f = spec.family_value(x, y, param, order)?;
    let fx = f.derivative(Var::X);
    let fy = f.derivative(Var::Y);
    if fx.value().abs() <= DIV_FLOOR {
        return Err(FieldError::FxNearZero { value: fx.value() });
    }
    let gamma = fy.divide(&fx)?;
    let gamma_x = gamma.derivative(Var::X);
    let gamma_y = gamma.derivative(Var::Y);
    let gamma_b = gamma.derivative(Var::B);
    let big_gamma = &(&gamma * &gamma_x) - &gamma_y;
    if big_gamma.value().abs() <= DIV_FLOOR {
        return Err(FieldError::GammaCapZero {
            value: big_gamma.value(),
        });
    }
    if gamma.value().abs() <= DIV_FLOOR {
        return Err(FieldError::GammaZero {
            value: gamma.value(),
        });
    }

    let (lambda, mu) = match route {
        CoefficientRoute::Generic => {
            let bg_x = big_gamma.derivative(Var::X);
            let bg_y = big_gamma.derivative(Var::Y);
            let lambda = (&(-&bg_x) + &bg_y.divide(&gamma)?).divide(&big_gamma)?;
            let mu = &(&lambda * &gamma) + &big_gamma.divide(&gamma)?.scaled(3.0);
            (lambda, mu)
        }
        CoefficientRoute::Homogeneous => homogeneous_lambda_mu(&gamma, x, y, order)?,
    };

    let mut flags = SingularFlags::default();
    let shallow = lambda.order() == 0;
    let mut jets = FieldJets {
        f,
        gamma_b: gamma_b.clone(),
        big_gamma,
        l: None,
        m: None,
        l_b: None,
        m_b: None,
        rho: None,
        d: None,
        lm_ratio: None,
        q: None,
        p: None,
        flags,
        gamma: gamma.clone(),
        lambda,
        mu,
    };
    if shallow {
        // order too low for the parameter cascade; coefficients only
        return Ok(jets);
    }
    let lambda_b = jets.lambda.derivative(Var::B);
    let mu_b = jets.mu.derivative(Var::B);

    if gamma_b.value().abs() <= DIV_FLOOR {
        flags.gamma_b_floor = true;
        jets.flags = flags;
        return Ok(jets);
    }

    let g2 = &gamma * &gamma;
    let one = Jet::constant(1.0, g2.order());
    let denom = &(&one + &g2) * &gamma_b;
    let prefactor = (-&g2).divide(&denom)?;
    let l = &prefactor * &lambda_b;
    let m = &prefactor * &mu_b;
    let l_b = l.derivative(Var::B);
    let m_b = m.derivative(Var::B);
    jets.d = Some(&(&l * &m_b) - &(&m * &l_b));

    if m.value().abs() <= DIV_FLOOR {
        flags.m_floor = true;
    } else {
        jets.lm_ratio = Some(l.divide(&m)?);
    }

    if m_b.value().abs() <= DIV_FLOOR {
        flags.m_b_floor = true;
    } else {
        let rho = -&l_b.divide(&m_b)?;
        let q = &l + &(&m * &rho);
        if rho.value().abs() <= DIV_FLOOR {
            flags.rho_floor = true;
        } else if rho.order() >= 1 {
            let rho_x = rho.derivative(Var::X);
            jets.p = Some((&q.truncated(rho_x.order()) - &rho_x).divide(&rho)?);
        }
        jets.rho = Some(rho);
        jets.q = Some(q);
    }

    jets.l = Some(l);
    jets.m = Some(m);
    jets.l_b = Some(l_b);
    jets.m_b = Some(m_b);
    jets.flags = flags;
    Ok(jets)
}

/// PDE coefficients from the one-variable homogeneous forms:
///
/// ```text
/// lambda = ((gamma z + 1) g'' + z g'^2 + 2 gamma g') / (x gamma g')
/// mu     = ((gamma z + 1)(g'' gamma - 3 g'^2) + z gamma g'^2 + 2 gamma^2 g') / (x gamma g')
/// ```
///
/// with `g' = x gamma_y` and `g'' = x^2 gamma_yy` (zero-degree homogeneity
/// turns y-derivatives of gamma into z-derivatives).
fn homogeneous_lambda_mu(
    gamma: &Jet,
    x: f64,
    y: f64,
    order: usize,
) -> Result<(Jet, Jet), FieldError> {
    let xj = Jet::variable(Var::X, x, order);
    let yj = Jet::variable(Var::Y, y, order);
    let z = yj.divide(&xj)?;
    let gdot = &xj * &gamma.derivative(Var::Y);
    let gddot = &(&xj * &xj) * &gamma.derivative(Var::Y).derivative(Var::Y);
    let one = Jet::constant(1.0, gddot.order());
    let gz1 = &(gamma * &z) + &one;
    let gdot2 = &gdot * &gdot;
    let lam_num = &(&(&gz1 * &gddot) + &(&z * &gdot2)) + &(gamma * &gdot).scaled(2.0);
    let den = &(&xj * gamma) * &gdot;
    let lambda = lam_num.divide(&den)?;
    let mu_num = &(&(&gz1 * &(&(&gddot * gamma) - &gdot2.scaled(3.0)))
        + &(&(&z * gamma) * &gdot2))
        + &(&(gamma * gamma) * &gdot).scaled(2.0);
    let mu = mu_num.divide(&den)?;
    Ok((lambda, mu))
}

fn opt_value(jet: &Option<Jet>) -> f64 {
    jet.as_ref().map_or(f64::NAN, Jet::value)
}

fn opt_partial(jet: &Option<Jet>, i: usize, j: usize, k: usize) -> f64 {
    jet.as_ref()
        .and_then(|jet| jet.partial(i, j, k).ok())
        .unwrap_or(f64::NAN)
}

pub(crate) fn extract_fields(
    x: f64,
    y: f64,
    param: f64,
    jets: &FieldJets,
) -> Result<BozisFields, FieldError> {
    let gamma = &jets.gamma;
    Ok(BozisFields {
        x,
        y,
        param,
        gamma: gamma.value(),
        gamma_x: gamma.partial(1, 0, 0)?,
        gamma_y: gamma.partial(0, 1, 0)?,
        gamma_b: jets.gamma_b.value(),
        big_gamma: jets.big_gamma.value(),
        big_gamma_x: jets.big_gamma.partial(1, 0, 0)?,
        big_gamma_y: jets.big_gamma.partial(0, 1, 0)?,
        lambda: jets.lambda.value(),
        mu: jets.mu.value(),
        lambda_b: jets.lambda.partial(0, 0, 1)?,
        mu_b: jets.mu.partial(0, 0, 1)?,
        l: opt_value(&jets.l),
        m: opt_value(&jets.m),
        l_b: opt_value(&jets.l_b),
        m_b: opt_value(&jets.m_b),
        l_x: opt_partial(&jets.l, 1, 0, 0),
        l_y: opt_partial(&jets.l, 0, 1, 0),
        m_x: opt_partial(&jets.m, 1, 0, 0),
        m_y: opt_partial(&jets.m, 0, 1, 0),
        l_bx: opt_partial(&jets.l, 1, 0, 1),
        l_bb: opt_partial(&jets.l, 0, 0, 2),
        m_bb: opt_partial(&jets.m, 0, 0, 2),
        rho: opt_value(&jets.rho),
        rho_x: opt_partial(&jets.rho, 1, 0, 0),
        rho_y: opt_partial(&jets.rho, 0, 1, 0),
        rho_b: opt_partial(&jets.rho, 0, 0, 1),
        d: opt_value(&jets.d),
        lm_ratio_b: opt_partial(&jets.lm_ratio, 0, 0, 1),
        p: opt_value(&jets.p),
        q: opt_value(&jets.q),
        p_y: opt_partial(&jets.p, 0, 1, 0),
        q_x: opt_partial(&jets.q, 1, 0, 0),
        flags: jets.flags,
    })
}

/// Full field record at one (point, parameter) pair via the generic route,
/// at the default order [`FIELDS_ORDER`].
pub fn compute_fields(
    spec: &FamilySpec,
    x: f64,
    y: f64,
    param: f64,
) -> Result<BozisFields, FieldError> {
    compute_fields_at_order(spec, x, y, param, FIELDS_ORDER)
}

/// As [`compute_fields`] with an explicit family-jet order (>= 6 for the
/// full record, >= 7 to fill the integrability pair).
pub fn compute_fields_at_order(
    spec: &FamilySpec,
    x: f64,
    y: f64,
    param: f64,
    order: usize,
) -> Result<BozisFields, FieldError> {
    let jets = field_jets(spec, x, y, param, order, CoefficientRoute::Generic)?;
    extract_fields(x, y, param, &jets)
}

/// Field record with the PDE coefficients produced by the one-variable
/// homogeneous forms; requires the family to be positively homogeneous in
/// (x, y) (checked numerically on the slope function).
pub fn compute_fields_homogeneous(
    spec: &FamilySpec,
    x: f64,
    y: f64,
    param: f64,
) -> Result<BozisFields, FieldError> {
    check_homogeneous(spec, x, y, param)?;
    let jets = field_jets(
        spec,
        x,
        y,
        param,
        FIELDS_ORDER,
        CoefficientRoute::Homogeneous,
    )?;
    extract_fields(x, y, param, &jets)
}

/// Positively homogeneous families have a scale-invariant slope function:
/// gamma(s x, s y) = gamma(x, y) for s > 0.
fn check_homogeneous(spec: &FamilySpec, x: f64, y: f64, param: f64) -> Result<(), FieldError> {
    let gamma_at = |sx: f64, sy: f64| -> Result<f64, FieldError> {
        let f = spec.family_value(sx, sy, param, 1)?;
        let fx = f.partial(1, 0, 0)?;
        let fy = f.partial(0, 1, 0)?;
        if fx.abs() <= DIV_FLOOR {
            return Err(FieldError::FxNearZero { value: fx });
        }
        Ok(fy / fx)
    };
    let base = gamma_at(x, y)?;
    for s in [2.0, 0.5] {
        let scaled = gamma_at(s * x, s * y)?;
        let deviation = (scaled - base).abs() / base.abs().max(1.0);
        if deviation > 1e-10 {
            return Err(FieldError::NotHomogeneous { deviation });
        }
    }
    Ok(())
}

/// Values of (gamma, lambda, mu) only, from a shallow jet; used by the
/// per-point residual check of candidate forces.
pub(crate) fn coefficient_values(
    spec: &FamilySpec,
    x: f64,
    y: f64,
    param: f64,
) -> Result<(f64, f64, f64), FieldError> {
    let jets = field_jets(spec, x, y, param, 3, CoefficientRoute::Generic)?;
    Ok((jets.gamma.value(), jets.lambda.value(), jets.mu.value()))
}
