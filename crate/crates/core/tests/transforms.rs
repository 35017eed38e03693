use std::f64::consts::PI;
use std::sync::Arc;

use qmlab_core::discretization::legendre::spherical_harmonic;
use qmlab_core::discretization::{BoxGrid, ModeBasis, ModeIndex, Quadrature, SpectralState, SphereGrid};
use qmlab_core::C64;

#[test]
fn sphere_round_trip_is_exact_on_band_limited_fields() {
    let l_max = 10;
    let grid = Arc::new(SphereGrid::for_degree(l_max).unwrap());
    let basis = ModeBasis::Sphere { l_max };
    let coeffs: Vec<C64> = (0..basis.len()).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
    let state = SpectralState::new(basis, coeffs).unwrap();
    let field = grid.synthesize(&state).unwrap();
    let back = grid.analyze(&field, l_max).unwrap();
    for (a, b) in state.coeffs().iter().zip(back.coeffs()) {
        assert!((a - b).norm() < 1e-12);
    }
    // Parseval
    assert!((field.norm() - state.norm()).abs() < 1e-12);
}

#[test]
fn single_harmonics_on_the_grid() {
    let grid = Arc::new(SphereGrid::for_degree(6).unwrap());
    let y30 = grid.sample(|t, p| spherical_harmonic(3, 0, t, p));
    assert!((y30.norm() - 1.0).abs() < 1e-13);
    let s = grid.analyze(&y30, 6).unwrap();
    assert!((s.get(ModeIndex::Sphere { l: 3, m: 0 }).unwrap() - 1.0).norm() < 1e-13);
    // sinθ e^{iφ} = −√(8π/3) Y_{1,1}
    let f = grid.sample(|t, p| C64::from_polar(t.sin(), p));
    let s = grid.analyze(&f, 6).unwrap();
    let c = s.get(ModeIndex::Sphere { l: 1, m: 1 }).unwrap();
    assert!((c + (8.0 * PI / 3.0).sqrt()).norm() < 1e-12);
    // ∫ cos²θ = 4π/3
    let c2 = grid.sample_real(|t, _| t.cos().powi(2));
    assert!((c2.integrate().re - 4.0 * PI / 3.0).abs() < 1e-13);
}

#[test]
fn analysis_needs_enough_nodes() {
    let grid = Arc::new(SphereGrid::for_degree(4).unwrap());
    let f = grid.sample_real(|_, _| 1.0);
    assert!(grid.analyze(&f, 8).is_err());
}

#[test]
fn box_round_trip_parseval_and_plane_wave() {
    let grid = Arc::new(BoxGrid::new(6.0, 16).unwrap());
    let f = grid.sample(|x| C64::new((x[0] * x[1]).sin(), (x[2] - 1.0).cos() * 0.3));
    let s = grid.analyze(&f).unwrap();
    let back = grid.synthesize(&s).unwrap();
    assert!(back.distance(&f).unwrap() < 1e-12);
    assert!((s.norm() - f.norm()).abs() < 1e-12);

    let k = [2i64, -1, 3];
    let xi: Vec<f64> = k.iter().map(|&k| 2.0 * PI * k as f64 / 6.0).collect();
    let w = grid.sample(|x| C64::from_polar(6f64.powf(-1.5), xi.iter().zip(&x).map(|(a, b)| a * b).sum()));
    let s = grid.analyze(&w).unwrap();
    let pos = ModeBasis::Box { n: 16 }.position(ModeIndex::Box { k }).unwrap();
    assert!((s.coeffs()[pos] - 1.0).norm() < 1e-12);
    let k2: f64 = xi.iter().map(|x| x * x).sum();
    assert!((grid.laplacian_norm(&w).unwrap() - k2).abs() < 1e-10);
    assert!((grid.weights().iter().sum::<f64>() - 216.0).abs() < 1e-10);
}

#[test]
fn box_rejects_bad_sizes() {
    assert!(BoxGrid::new(1.0, 12).is_err());
    assert!(BoxGrid::new(-1.0, 8).is_err());
}
