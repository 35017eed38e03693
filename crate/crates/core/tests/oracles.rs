//! Frozen reference values.

use std::f64::consts::PI;
use std::sync::Arc;

use qmlab_core::discretization::{CylinderGrid, SphereGrid};
use qmlab_core::potentials::{BaseProfile, EquatorialCutoff, ScaledBumpPair};
use qmlab_core::quasimodes::{
    closed_form_norm, concentration_profile, make_equatorial, measure_pairing, solve_sturm_liouville,
    weakstar_limit_gap, EquatorialHarmonic,
};

#[test]
fn equatorial_norms() {
    // ‖sinⁿθ e^{inφ}‖² on S² = 4π·4ⁿ(n!)²/(2n+1)!
    assert!((closed_form_norm(1, 2) - 8.0 * PI / 3.0).abs() < 1e-13);
    assert!((closed_form_norm(2, 2) - 32.0 * PI / 15.0).abs() < 1e-13);
    assert!((closed_form_norm(3, 2) - 4.0 * PI * 64.0 * 36.0 / 5040.0).abs() < 1e-12);
    assert_eq!(EquatorialHarmonic::new(7, 2).eigenvalue(), 56.0);
    assert_eq!(EquatorialHarmonic::new(7, 3).eigenvalue(), 63.0);
}

#[test]
fn weakstar_gaps() {
    let grid = Arc::new(SphereGrid::for_degree(60).unwrap());
    let g = weakstar_limit_gap(|t, _| t.cos().powi(2), 10, &grid).unwrap();
    assert!((g.gap - 1.0 / 23.0).abs() < 1e-12, "{}", g.gap);
    assert!((g.gap - 0.04348).abs() < 1e-5);
    let g = weakstar_limit_gap(|t, p| (t.sin() * p.cos()).powi(2), 50, &grid).unwrap();
    assert!((g.pairing - 0.5 * 102.0 / 103.0).abs() < 1e-12);
    let g = weakstar_limit_gap(|_, _| 1.0, 20, &grid).unwrap();
    assert!(g.gap.abs() < 1e-13);
    let (_, u) = make_equatorial(5, &grid).unwrap();
    let f = grid.sample_real(|t, _| t.cos().powi(2));
    assert!((measure_pairing(&f, &u).unwrap() - 1.0 / 13.0).abs() < 1e-13);
}

#[test]
fn flat_critical_time() {
    let base = BaseProfile::new(1.0).unwrap();
    let pair = ScaledBumpPair::new(4, base, [0.0; 3]).unwrap();
    // π/(16 ln 5)
    assert!((pair.critical_time() - 0.121998829114448).abs() < 1e-14, "{}", pair.critical_time());
    assert!((pair.amplitude - 16.0 * 5f64.ln()).abs() < 1e-12);
}

#[test]
fn cutoff_geometry() {
    let c = EquatorialCutoff::new(64, 0.5, 0.01).unwrap();
    assert!((c.support_area() - 0.99 / 64.0).abs() < 1e-15);
    assert!((c.delta - 1.2311e-3).abs() < 1e-6, "{}", c.delta);
    assert_eq!(c.value(PI / 2.0), 1.0);
    assert_eq!(c.value(PI / 2.0 + c.delta), 0.0);
}

#[test]
fn cosh_profile_ground_modes_leave_the_waist() {
    // m²/f² peaks where f = cosh is smallest, so ground modes are pushed
    // toward the ends of [−1, 1] as m grows
    let grid = Arc::new(CylinderGrid::new(-1.0, 1.0, 511, 64, f64::cosh).unwrap());
    let mut prev = f64::INFINITY;
    for m in [10, 20, 40, 80] {
        let modes = solve_sturm_liouville(&grid, m, 1).unwrap();
        let mass = concentration_profile(&modes[0], (m as f64).powf(-0.25));
        assert!(mass < prev);
        prev = mass;
    }
    assert!(prev < 1e-15, "{prev}");
    let wide = solve_sturm_liouville(&grid, 10, 1).unwrap();
    assert!((concentration_profile(&wide[0], 0.5623413251903491) - 0.3588).abs() < 2e-3);
}
