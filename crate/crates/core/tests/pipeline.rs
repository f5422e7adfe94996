//! End-to-end checks of the field cascade, classification, force solving
//! and residual verification on the reference families.
//!
//! Reference values marked "hp" were computed with a 50-digit
//! high-precision run of the same field definitions (independent
//! arithmetic, so they pin both the algebra and the conditioning).

use apsis_core::bozis::{
    check_force_against_family, classify, compute_fields_at_order, compute_fields_homogeneous,
    pq_sample, reconstruct_potential, solve_force, Branch, Tolerances, ZeroDecision,
};
use apsis_core::dynamics::NewtonianForce;
use apsis_core::families::{analytic_gamma, polar_grid, FamilySpec, ORACLE_COS_FLOOR};
use apsis_core::force::PlanarForce;
use approx::assert_relative_eq;
use std::collections::BTreeMap;

fn precessing_family() -> FamilySpec {
    FamilySpec::precessing_cartesian(0.3, 0.2).unwrap()
}

fn kepler_family() -> FamilySpec {
    FamilySpec::by_eccentricity(1.0, 1.0).unwrap()
}

fn point_a() -> (f64, f64) {
    (2.0 * 0.7f64.cos(), 2.0 * 0.7f64.sin())
}

fn point_b() -> (f64, f64) {
    (1.2 * 0.9f64.cos(), 1.2 * 0.9f64.sin())
}

#[test]
fn precessing_fields_match_high_precision_reference() {
    let (x, y) = point_a();
    let f = compute_fields_at_order(&precessing_family(), x, y, 1.5, 7).unwrap();
    // hp reference at (r, theta) = (2, 0.7), b = 1.5
    assert_relative_eq!(f.gamma, 0.48748523329007283213, max_relative = 1e-12);
    assert_relative_eq!(f.big_gamma, -0.37361399156134436594, max_relative = 1e-12);
    assert_relative_eq!(f.lambda, 1.1226240865223696177, max_relative = 1e-12);
    assert_relative_eq!(f.mu, -1.7519700056147024677, max_relative = 1e-12);
    assert_relative_eq!(f.gamma_b, -0.37686805859550556069, max_relative = 1e-12);
    assert_relative_eq!(f.lambda_b, 0.87711786720655014103, max_relative = 1e-11);
    assert_relative_eq!(f.mu_b, 1.2680785257245041388, max_relative = 1e-11);
    assert_relative_eq!(f.l, 0.44688581511837605805, max_relative = 1e-11);
    assert_relative_eq!(f.m, 0.6460777129159269446, max_relative = 1e-11);
    assert_relative_eq!(f.l_b, 4.2494725173898157085, max_relative = 1e-11);
    assert_relative_eq!(f.m_b, 0.41038004045418599093, max_relative = 1e-11);
    assert_relative_eq!(f.rho, -10.354968805711734763, max_relative = 1e-11);
    assert_relative_eq!(f.d, -2.5620964662476176759, max_relative = 1e-11);
    assert_relative_eq!(f.lm_ratio_b, 6.1379869069644430211, max_relative = 1e-11);
    assert_relative_eq!(f.rho_b, -35.79533594734234749, max_relative = 1e-10);
    assert_relative_eq!(f.rho_x, 23.703310093563215529, max_relative = 1e-10);
    assert_relative_eq!(f.rho_y, -28.141561302948803415, max_relative = 1e-10);
    assert_relative_eq!(f.p, 2.8919970116410707748, max_relative = 1e-10);
    assert_relative_eq!(f.q, -6.2432287481916290088, max_relative = 1e-10);
    assert_relative_eq!(f.p_y, 9.7468549967102316442, max_relative = 1e-9);
    assert_relative_eq!(f.q_x, 12.550819805835634212, max_relative = 1e-9);
    assert_relative_eq!(
        f.integrability_residual(),
        -2.8039648091254025673,
        max_relative = 1e-9
    );
    assert!(!f.flags.any());
}

#[test]
fn kepler_fields_match_high_precision_reference() {
    let (x, y) = point_b();
    let f = compute_fields_at_order(&kepler_family(), x, y, 0.3, 7).unwrap();
    assert_relative_eq!(f.gamma, 1.6880453140987069195, max_relative = 1e-12);
    assert_relative_eq!(f.big_gamma, -7.3455212966536278325, max_relative = 1e-12);
    assert_relative_eq!(f.lambda, 5.6544347578065297705, max_relative = 1e-12);
    assert_relative_eq!(f.mu, -3.5095438852543501823, max_relative = 1e-12);
    assert_relative_eq!(f.l, -1.3402065757431294334, max_relative = 1e-10);
    assert_relative_eq!(f.m, -0.49050245414987945149, max_relative = 1e-10);
    assert_relative_eq!(f.l_b, 0.099000278842034646282, max_relative = 1e-9);
    assert_relative_eq!(f.m_b, -0.078561784911806055669, max_relative = 1e-9);
    assert_relative_eq!(f.rho, 1.2601582175503391371, max_relative = 1e-9);
    // the orientation parameter drops out of rho and of the integrability
    // pair: both vanish identically for this family
    assert!(f.rho_b.abs() < 1e-10, "rho_b = {:e}", f.rho_b);
    assert!(
        f.integrability_residual().abs() < 1e-9,
        "integrability = {:e}",
        f.integrability_residual()
    );
}

/// The candidate-force log-derivatives of the b = 1 family must equal the
/// Newtonian field's: P = 1/x - 3x/r^2, Q = -3y/r^2 (closed form, computed
/// here independently of the jet pipeline).
#[test]
fn kepler_log_derivatives_are_newtonian() {
    for (r, theta, w) in [
        (1.2, 0.9, 0.3),
        (0.8, 0.5, 0.0),
        (1.9, 1.1, 0.6),
        (2.5, 0.35, 0.15),
    ] {
        let (x, y) = (r * f64::cos(theta), r * f64::sin(theta));
        let s = pq_sample(&kepler_family(), x, y, w).unwrap();
        let r2 = x * x + y * y;
        assert_relative_eq!(s.p, 1.0 / x - 3.0 * x / r2, max_relative = 1e-8);
        assert_relative_eq!(s.q, -3.0 * y / r2, max_relative = 1e-8);
        // rho must be the Newtonian component ratio y/x... for the
        // inverse-square field Y/X = y/x exactly
        assert_relative_eq!(s.rho, y / x, max_relative = 1e-8);
    }
}

#[test]
fn homogeneous_route_agrees_with_generic_on_precessing_family() {
    let spec = precessing_family();
    for (r, theta) in [(2.0, 0.7), (1.1, 2.3), (2.7, -0.8)] {
        let (x, y) = (r * f64::cos(theta), r * f64::sin(theta));
        let generic = compute_fields_at_order(&spec, x, y, 1.5, 6).unwrap();
        let homog = compute_fields_homogeneous(&spec, x, y, 1.5).unwrap();
        assert_relative_eq!(homog.lambda, generic.lambda, max_relative = 1e-9);
        assert_relative_eq!(homog.mu, generic.mu, max_relative = 1e-9);
        assert_relative_eq!(homog.lambda_b, generic.lambda_b, max_relative = 1e-9);
        assert_relative_eq!(homog.mu_b, generic.mu_b, max_relative = 1e-9);
        assert_relative_eq!(homog.l, generic.l, max_relative = 1e-8);
        assert_relative_eq!(homog.m, generic.m, max_relative = 1e-8);
        assert_relative_eq!(homog.l_b, generic.l_b, max_relative = 1e-7);
        assert_relative_eq!(homog.m_b, generic.m_b, max_relative = 1e-7);
    }
}

#[test]
fn jet_gamma_matches_analytic_oracle_on_grid() {
    let (e, theta0) = (0.3, 0.2);
    let spec = FamilySpec::precessing_cartesian(e, theta0).unwrap();
    let mut checked = 0;
    for b in [0.8, 1.0, 1.3, 2.0] {
        for i in 0..24 {
            let theta = 0.1 + (2.0 * std::f64::consts::PI - 0.2) * i as f64 / 23.0;
            if theta.cos().abs() < ORACLE_COS_FLOOR {
                continue;
            }
            let oracle = match analytic_gamma(e, theta0, b, theta) {
                Ok(g) => g,
                Err(_) => continue,
            };
            for r in [0.7, 1.6, 2.8] {
                let (x, y) = (r * f64::cos(theta), r * f64::sin(theta));
                let fields = match compute_fields_at_order(&spec, x, y, b, 6) {
                    Ok(f) => f,
                    Err(_) => continue,
                };
                assert_relative_eq!(fields.gamma, oracle, max_relative = 1e-9);
                checked += 1;
            }
        }
    }
    assert!(checked > 150, "only {checked} points checked");
}

/// Rotating the apse constant and the evaluation point together must rotate
/// the slope angle by the same amount.
#[test]
fn rotational_consistency_of_gamma() {
    let delta = 0.37;
    let base = FamilySpec::precessing_cartesian(0.3, 0.2).unwrap();
    let rotated = FamilySpec::precessing_cartesian(0.3, 0.2 + delta).unwrap();
    for (r, theta, b) in [(1.5, 0.6, 1.3), (2.2, 1.9, 0.9), (0.9, -1.1, 1.7)] {
        let (x, y) = (r * f64::cos(theta), r * f64::sin(theta));
        let (xr, yr) = (
            r * f64::cos(theta + delta),
            r * f64::sin(theta + delta),
        );
        let g = compute_fields_at_order(&base, x, y, b, 6).unwrap().gamma;
        let gr = compute_fields_at_order(&rotated, xr, yr, b, 6).unwrap().gamma;
        assert_relative_eq!((gr.atan() - delta).tan(), g, max_relative = 1e-9);
    }
}

fn classification_grid() -> Vec<(f64, f64)> {
    polar_grid(
        0.5,
        3.0,
        10,
        0.15,
        2.0 * std::f64::consts::PI - 0.15,
        20,
        0.05,
        0.0,
    )
}

#[test]
fn precessing_family_classifies_no_force() {
    let grid = classification_grid();
    assert_eq!(grid.len(), 200);
    let outcome = classify(
        &precessing_family(),
        &grid,
        &[1.1, 1.5, 2.0, 2.5],
        &Tolerances::default(),
        6,
    )
    .unwrap();
    assert_eq!(outcome.verdict.branch, Branch::NoForce);
    for name in ["l_b", "m_b", "lm_ratio_b", "rho_b"] {
        let ev = outcome.verdict.evidence_named(name).unwrap();
        assert_eq!(ev.decision, ZeroDecision::NonZero, "{name}: {ev:?}");
        assert!(ev.normalized_min >= 1e-6, "{name} normalized min {}", ev.normalized_min);
    }
}

#[test]
fn sho_family_classifies_b_independent() {
    let spec = FamilySpec::from_expression("x^2+b*y^2", BTreeMap::new()).unwrap();
    let grid = polar_grid(0.5, 2.5, 6, 0.2, 6.0, 14, 0.05, 0.05);
    let outcome = classify(&spec, &grid, &[1.0, 1.5, 2.0, 2.5], &Tolerances::default(), 6).unwrap();
    assert_eq!(outcome.verdict.branch, Branch::BIndependentPDE);
}

#[test]
fn circle_family_classifies_degenerate() {
    let spec = FamilySpec::precessing_cartesian(0.0, 0.0).unwrap();
    let grid = polar_grid(0.6, 2.0, 5, 0.2, 6.0, 10, 0.05, 0.05);
    let outcome = classify(&spec, &grid, &[1.0, 1.5, 2.0], &Tolerances::default(), 6).unwrap();
    assert_eq!(outcome.verdict.branch, Branch::Degenerate);
}

fn kepler_grid() -> Vec<(f64, f64)> {
    polar_grid(0.7, 2.0, 6, 0.25, 1.2, 10, 0.0, 0.0)
}

const KEPLER_PARAMS: [f64; 4] = [0.0, 0.3, 0.6, 0.9];

#[test]
fn kepler_family_classifies_solvable_and_recovers_newton() {
    let spec = kepler_family();
    let grid = kepler_grid();
    let tol = Tolerances::default();
    let outcome = classify(&spec, &grid, &KEPLER_PARAMS, &tol, 6).unwrap();
    assert_eq!(
        outcome.verdict.branch,
        Branch::Solvable,
        "evidence: {:#?}",
        outcome.verdict.evidence
    );

    let anchor = (1.2 * 0.7f64.cos(), 1.2 * 0.7f64.sin());
    let x0 = 1.0;
    let field = solve_force(&spec, &outcome.verdict, &grid, &KEPLER_PARAMS, &tol, anchor, x0)
        .unwrap();

    // gauge-normalized comparison against -F0 x / r^3
    let (ax, ay) = anchor;
    let r_anchor = (ax * ax + ay * ay).sqrt();
    let f0 = -x0 * r_anchor.powi(3) / ax;
    for &(x, y) in grid.iter().step_by(7) {
        let (fx, fy) = field.components(x, y).unwrap();
        let r = (x * x + y * y).sqrt();
        assert_relative_eq!(fx, -f0 * x / r.powi(3), max_relative = 1e-6);
        assert_relative_eq!(fy, -f0 * y / r.powi(3), max_relative = 1e-6);
    }
    assert!(field.conservativity_residual < 1e-7);
    assert!(field.centrality_residual < 1e-7);

    // the derived force satisfies the compatibility PDE on the grid
    let report = check_force_against_family(&spec, &field, &grid, &KEPLER_PARAMS);
    assert!(
        report.max_normalized < 1e-7,
        "max residual {:e} at {:?}",
        report.max_normalized,
        report.worst
    );

    // derived potential tracks the Newtonian -F0/r profile
    let v_probe = field.potential(1.5 * 0.5f64.cos(), 1.5 * 0.5f64.sin());
    let v = v_probe.expect("potential attached").unwrap();
    let expected = -f0 / 1.5 - (-f0 / r_anchor);
    assert_relative_eq!(v, expected, max_relative = 1e-6);
}

#[test]
fn solve_rejects_non_solvable_verdicts() {
    let spec = precessing_family();
    let grid = classification_grid();
    let b_samples = [1.1, 1.5, 2.0, 2.5];
    let tol = Tolerances::default();
    let outcome = classify(&spec, &grid, &b_samples, &tol, 6).unwrap();
    let err = solve_force(&spec, &outcome.verdict, &grid, &b_samples, &tol, (1.0, 0.5), 1.0);
    assert!(err.is_err());
}

#[test]
fn gauge_scaling_is_exact() {
    let spec = kepler_family();
    let grid = kepler_grid();
    let tol = Tolerances::default();
    let outcome = classify(&spec, &grid, &KEPLER_PARAMS, &tol, 6).unwrap();
    let anchor = (1.2 * 0.7f64.cos(), 1.2 * 0.7f64.sin());
    let f1 = solve_force(&spec, &outcome.verdict, &grid, &KEPLER_PARAMS, &tol, anchor, 1.0).unwrap();
    let f2 = solve_force(&spec, &outcome.verdict, &grid, &KEPLER_PARAMS, &tol, anchor, 2.0).unwrap();
    for &(x, y) in grid.iter().step_by(11) {
        let (fx1, fy1) = f1.components(x, y).unwrap();
        let (fx2, fy2) = f2.components(x, y).unwrap();
        assert_relative_eq!(fx2, 2.0 * fx1, max_relative = 1e-14);
        assert_relative_eq!(fy2, 2.0 * fy1, max_relative = 1e-14);
        let v1 = f1.potential(x, y).unwrap().unwrap();
        let v2 = f2.potential(x, y).unwrap().unwrap();
        assert_relative_eq!(v2, 2.0 * v1, max_relative = 1e-14);
    }
    // residual classifications are gauge-free
    assert_relative_eq!(
        f1.conservativity_residual,
        f2.conservativity_residual,
        max_relative = 1e-12
    );
}

#[test]
fn newton_passes_kepler_family_and_fails_precessing() {
    let newton = NewtonianForce { f0: 1.0 };
    let pass = check_force_against_family(&kepler_family(), &newton, &kepler_grid(), &KEPLER_PARAMS);
    assert!(
        pass.max_normalized < 1e-8,
        "kepler residual {:e}",
        pass.max_normalized
    );

    let fail = check_force_against_family(
        &precessing_family(),
        &newton,
        &classification_grid(),
        &[1.5],
    );
    assert!(
        fail.max_normalized > 1e-3,
        "expected a decisive failure, got {:e}",
        fail.max_normalized
    );
}

#[test]
fn reconstructed_newtonian_potential_profile() {
    let newton = NewtonianForce { f0: 1.0 };
    let grid = kepler_grid();
    let pot = reconstruct_potential(std::sync::Arc::new(newton), (1.0, 0.0), &grid, 1e-11, 1e-6)
        .unwrap();
    // V(r) - V(1) = -1/r + 1 for the unit-strength field
    for (x, y) in [(2.0_f64, 0.0_f64), (0.5, 0.5), (1.0, 1.5)] {
        let r = (x * x + y * y).sqrt();
        let v = pot.value(x, y).unwrap();
        assert_relative_eq!(v, -1.0 / r + 1.0, max_relative = 1e-8, epsilon = 1e-10);
    }
}
