//! The inverse-problem pipeline: per-point field cascade, grid
//! classification, force derivation and verification.

mod classify;
mod fields;
mod solve;

pub use classify::{
    classify, Branch, ClassifyError, ClassifyOutcome, CompatibilityVerdict, ConditionEvidence,
    ExclusionCensus, SampleRecord, Tolerances, ZeroDecision,
};
pub use fields::{
    compute_fields, compute_fields_at_order, compute_fields_homogeneous, BozisFields, FieldError,
    SingularFlags, FIELDS_ORDER, INTEGRABILITY_ORDER,
};
pub use solve::{
    check_force_against_family, pq_sample, reconstruct_potential, solve_force, ForceField,
    PotentialError, PotentialField, PqSample, ResidualReport, ResidualRow, SolveError,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use crate::force::{ForceError, PlanarForce};
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    fn sho_family() -> FamilySpec {
        FamilySpec::from_expression("x^2+b*y^2", BTreeMap::new()).unwrap()
    }

    /// Hand-differentiated chain for f = x^2 + b y^2 at (1, 2, 3):
    /// gamma = b y / x = 6, Gamma = -b(x^2 + b y^2)/x^3 = -39,
    /// lambda = 3/x = 3, mu = -3/y = -1.5.
    #[test]
    fn sho_anchor_fields() {
        let f = compute_fields(&sho_family(), 1.0, 2.0, 3.0).unwrap();
        assert_relative_eq!(f.gamma, 6.0, max_relative = 1e-12);
        assert_relative_eq!(f.big_gamma, -39.0, max_relative = 1e-12);
        assert_relative_eq!(f.lambda, 3.0, max_relative = 1e-12);
        assert_relative_eq!(f.mu, -1.5, max_relative = 1e-12);
        // lambda = 3/x and mu = -3/y carry no parameter dependence
        assert_relative_eq!(f.lambda_b, 0.0, epsilon = 1e-12);
        assert_relative_eq!(f.mu_b, 0.0, epsilon = 1e-12);
        // so L = M = 0 and rho is blocked by the M_b floor
        assert_relative_eq!(f.l, 0.0, epsilon = 1e-12);
        assert_relative_eq!(f.m, 0.0, epsilon = 1e-12);
        assert!(f.flags.m_b_floor);
        assert!(f.rho.is_nan());
    }

    #[test]
    fn sho_internal_identity() {
        // mu = lambda gamma + 3 Gamma / gamma must hold wherever defined
        let f = compute_fields(&sho_family(), 1.3, -0.8, 2.2).unwrap();
        let expect = f.lambda * f.gamma + 3.0 * f.big_gamma / f.gamma;
        assert_relative_eq!(f.mu, expect, max_relative = 1e-10);
    }

    #[test]
    fn sho_homogeneous_route_agrees() {
        let spec = sho_family();
        let generic = compute_fields(&spec, 1.0, 2.0, 3.0).unwrap();
        let homog = compute_fields_homogeneous(&spec, 1.0, 2.0, 3.0).unwrap();
        assert_relative_eq!(homog.lambda, generic.lambda, max_relative = 1e-9);
        assert_relative_eq!(homog.mu, generic.mu, max_relative = 1e-9);
        assert_relative_eq!(homog.lambda, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn non_homogeneous_family_is_rejected() {
        let spec = FamilySpec::from_expression("x+b*y^2", BTreeMap::new()).unwrap();
        assert!(matches!(
            compute_fields_homogeneous(&spec, 1.0, 2.0, 3.0),
            Err(FieldError::NotHomogeneous { .. })
        ));
    }

    #[test]
    fn straight_lines_hit_gamma_cap_zero() {
        let spec = FamilySpec::from_expression("y-b*x", BTreeMap::new()).unwrap();
        assert!(matches!(
            compute_fields(&spec, 1.0, 2.0, 1.5),
            Err(FieldError::GammaCapZero { .. })
        ));
    }

    #[test]
    fn relabelled_one_parameter_family_flags_gamma_b() {
        let spec = FamilySpec::from_expression("(x^2+y^2)*b", BTreeMap::new()).unwrap();
        let f = compute_fields(&spec, 1.0, 2.0, 1.5).unwrap();
        assert!(f.flags.gamma_b_floor);
        assert!(f.l.is_nan());
    }

    struct Harmonic;
    impl PlanarForce for Harmonic {
        fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
            Ok((-x, -y))
        }
        fn with_partials(&self, x: f64, y: f64) -> Result<crate::force::ForceSample, ForceError> {
            Ok(crate::force::ForceSample {
                fx: -x,
                fy: -y,
                fx_x: -1.0,
                fx_y: 0.0,
                fy_x: 0.0,
                fy_y: -1.0,
            })
        }
    }

    /// Hand-checked: for f = x^2 + b y^2 and X = -x, Y = -y the PDE
    /// residual vanishes (LHS = 1 - 1, RHS = 3(-1) + (-1.5)(-2)).
    #[test]
    fn harmonic_force_satisfies_sho_family() {
        let report = check_force_against_family(
            &sho_family(),
            &Harmonic,
            &[(1.0, 2.0), (0.7, -1.1), (-1.3, 0.9)],
            &[1.0, 2.0, 3.0],
        );
        assert!(report.max_normalized < 1e-12, "max {}", report.max_normalized);
        assert_eq!(report.dropped, 0);
    }

    /// Manufactured exact field: P = 1/x, Q = 1/y integrates to X = X0 x y
    /// from anchor (1, 1).
    #[test]
    fn manufactured_log_field_integrates_exactly() {
        let field = ForceField::from_log_derivatives(
            |x, y| {
                Ok(PqSample {
                    p: 1.0 / x,
                    q: 1.0 / y,
                    rho: 1.0,
                    rho_x: 0.0,
                    rho_y: 0.0,
                })
            },
            (1.0, 1.0),
            1.0,
            1e-11,
        );
        let (fx, _fy) = field.components(2.0, 3.0).unwrap();
        assert_relative_eq!(fx, 6.0, max_relative = 1e-9);
        // path independence: anchor on the other corner of the rectangle
        let via_other = ForceField::from_log_derivatives(
            |x, y| {
                Ok(PqSample {
                    p: 1.0 / x,
                    q: 1.0 / y,
                    rho: 1.0,
                    rho_x: 0.0,
                    rho_y: 0.0,
                })
            },
            (1.0, 3.0),
            3.0, // X(1, 3) = 3 for the same underlying field
            1e-11,
        );
        let (fx2, _) = via_other.components(2.0, 3.0).unwrap();
        assert_relative_eq!(fx, fx2, max_relative = 1e-9);
    }

    #[test]
    fn potential_of_harmonic_force() {
        let grid = vec![(0.5, 0.5), (1.0, 2.0), (2.0, 1.0)];
        let pot = reconstruct_potential(
            std::sync::Arc::new(Harmonic),
            (1.0, 1.0),
            &grid,
            1e-11,
            1e-8,
        )
        .unwrap();
        // V = (x^2 + y^2)/2 - anchor value 1
        let v = pot.value(2.0, 3.0).unwrap();
        assert_relative_eq!(v, (4.0 + 9.0) / 2.0 - 1.0, max_relative = 1e-9);
    }

    struct Curl;
    impl PlanarForce for Curl {
        fn components(&self, x: f64, y: f64) -> Result<(f64, f64), ForceError> {
            Ok((-y, x))
        }
    }

    #[test]
    fn rotational_field_is_not_conservative() {
        let grid = vec![(1.0, 0.5), (0.5, 1.0)];
        let res = reconstruct_potential(std::sync::Arc::new(Curl), (1.0, 1.0), &grid, 1e-10, 1e-8);
        assert!(matches!(res, Err(PotentialError::NotConservative { .. })));
    }
}
