use std::sync::Arc;

use super::{sphere_potential_matrix, DenseExponential, HamiltonianBlock};
use crate::discretization::{BoxGrid, GridField, ModeBasis, Quadrature, SpectralState, ZonalGrid};
use crate::quasimodes::EquatorialHarmonic;
use crate::{Error, Result, C64};

/// `e^{−itV(x)} u0(x)`, the evolution generated by a multiplication operator.
pub fn multiplication_phase<G: Quadrature>(
    v_total: &GridField<G>,
    u0: &GridField<G>,
    t: f64,
) -> Result<GridField<G>> {
    v_total.check_same_grid(u0)?;
    let values = v_total.values().iter().zip(u0.values()).map(|(v, u)| (C64::new(0.0, -t) * v).exp() * u).collect();
    GridField::new(u0.grid().clone(), values)
}

fn check_unit(u0: &SpectralState) -> Result<()> {
    let n = u0.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("probe must be normalized, ‖u0‖ = {n}")));
    }
    Ok(())
}

/// `‖e^{−itH₁}u0 − e^{−itH₂}u0‖` for a unit probe: a lower bound for the
/// operator-norm distance of the two propagators.
pub fn propagator_distance_probe(h1: &HamiltonianBlock, h2: &HamiltonianBlock, u0: &SpectralState, t: f64) -> Result<f64> {
    check_unit(u0)?;
    if h1.basis() != h2.basis() || h1.basis() != u0.basis() {
        return Err(Error::InvalidParameter("blocks and probe must share one basis".into()));
    }
    if h1.shift() != h2.shift() {
        return Err(Error::InvalidParameter("blocks must carry the same diagonal shift".into()));
    }
    let a = DenseExponential::new(h1)?.evolve(u0, t)?;
    let b = DenseExponential::new(h2)?.evolve(u0, t)?;
    Ok(a.state.coeffs().iter().zip(b.state.coeffs()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt())
}

/// The measured quantities entering the lower bound for
/// `‖e^{−it(H_V + κφ)} − e^{−itH_V}‖` probed with an equatorial harmonic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DuhamelDiagnostics {
    /// Rayleigh quotient `λ = ⟨u, (−Δ+V)u⟩`
    pub lambda: f64,
    /// quasimode residual `r = ‖(−Δ+V−λ)u‖`
    pub residual: f64,
    /// deficiency `D = ‖(φ−1)u‖`
    pub deficiency: f64,
    /// `1 − ∫(2φ − φ²)|u|²`, which must equal `D²`
    pub deficiency_identity: f64,
    /// `‖v‖` with `v = (−i∂ₜ + H_V + κφ)(e^{−i(λ+κ)t}u)`
    pub duhamel_residual: f64,
    /// `r + κD`
    pub residual_bound: f64,
    /// `2|sin(κt/2)| − (2r + κD)t`
    pub lower_bound: f64,
}

/// Quasimode and cutoff diagnostics on a zonal rule.
///
/// `u` is an equatorial harmonic (an exact eigenfunction of `−Δ`), so every
/// term is a pointwise integral: `(−Δ+V−λ)u = (V − ⟨V⟩)u`. `v` and `phi` are
/// the axisymmetric potential and the cutoff (without κ) on the same rule.
pub fn duhamel_diagnostics(
    u: &EquatorialHarmonic,
    v: &GridField<ZonalGrid>,
    phi: &GridField<ZonalGrid>,
    kappa: f64,
    t: f64,
) -> Result<DuhamelDiagnostics> {
    v.check_same_grid(phi)?;
    let grid = v.grid();
    let dens: Vec<f64> = grid.thetas().iter().map(|&th| u.density(th)).collect();
    let w = grid.weights();
    let integrate = |g: &dyn Fn(usize) -> f64| -> f64 { (0..w.len()).map(|i| w[i] * g(i) * dens[i]).sum() };
    let mass = integrate(&|_| 1.0);
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::Resolution(format!("zonal rule misses the mass of u_{}: ∫|u|² = {mass}", u.n)));
    }
    let vv = |i: usize| v.values()[i].re;
    let pp = |i: usize| phi.values()[i].re;
    let v_mean = integrate(&|i| vv(i));
    let residual = integrate(&|i| (vv(i) - v_mean).powi(2)).sqrt();
    let deficiency = integrate(&|i| (1.0 - pp(i)).powi(2)).sqrt();
    let deficiency_identity = 1.0 - integrate(&|i| 2.0 * pp(i) - pp(i).powi(2));
    let duhamel_residual = integrate(&|i| (vv(i) - v_mean + kappa * (pp(i) - 1.0)).powi(2)).sqrt();
    let lower_bound = 2.0 * (0.5 * kappa * t).sin().abs() - (2.0 * residual + kappa * deficiency) * t.abs();
    Ok(DuhamelDiagnostics {
        lambda: u.eigenvalue() + v_mean,
        residual,
        deficiency,
        deficiency_identity,
        duhamel_residual,
        residual_bound: residual + kappa * deficiency,
        lower_bound,
    })
}

/// `(measured, bound)` with measured the probe distance between `H_V` and
/// `H_V + W` (W axisymmetric on a zonal rule) and bound `t‖W‖_∞`.
pub fn linfty_stability_check(
    h_v: &HamiltonianBlock,
    w: &GridField<ZonalGrid>,
    u0: &SpectralState,
    t: f64,
) -> Result<(f64, f64)> {
    let ModeBasis::SphereBlock { m, l_max } = h_v.basis() else {
        return Err(Error::InvalidParameter("the L^∞ check runs on sphere blocks".into()));
    };
    let coupling = sphere_potential_matrix(w, m.unsigned_abs() as usize, l_max);
    let h_w = h_v.with_added(&coupling)?;
    let measured = propagator_distance_probe(h_v, &h_w, u0, t)?;
    Ok((measured, t.abs() * w.max_abs()))
}

/// Composite Simpson rule for samples on an even number of equal intervals.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd number ≥ 3 of samples");
    let inner: f64 = values[1..n - 1].iter().enumerate().map(|(i, v)| if i % 2 == 0 { 4.0 * v } else { 2.0 * v }).sum();
    h / 3.0 * (values[0] + inner + values[n - 1])
}

/// `‖Δ(e^{−isV}u0)‖_{L²}` at each `s`, computed spectrally.
pub fn phase_laplacian_norms(v_total: &GridField<BoxGrid>, u0: &GridField<BoxGrid>, s: &[f64]) -> Result<Vec<f64>> {
    v_total.check_same_grid(u0)?;
    let grid: &Arc<BoxGrid> = u0.grid();
    s.iter()
        .map(|&s| {
            let f = multiplication_phase(v_total, u0, s)?;
            grid.laplacian_norm(&f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::ModeIndex;
    use crate::potentials::EquatorialCutoff;
    use crate::propagator::free_sphere_block;

    #[test]
    fn phase_examples() {
        let grid = Arc::new(ZonalGrid::gauss(8));
        let u = grid.sample_complex(|t| C64::new(t.cos(), t.sin()));
        let v = grid.sample(|t| 3.0 * t);
        assert_eq!(multiplication_phase(&v, &u, 0.0).unwrap().values(), u.values());
        let p = multiplication_phase(&v, &u, 0.7).unwrap();
        for (a, b) in p.values().iter().zip(u.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }

    #[test]
    fn probe_scalar_shift() {
        let h = free_sphere_block(4, 12, 0).unwrap();
        let u = SpectralState::unit(h.basis(), ModeIndex::Sphere { l: 6, m: 4 }).unwrap();
        assert_eq!(propagator_distance_probe(&h, &h, &u, 1.3).unwrap(), 0.0);
        let c = 0.9;
        let d = propagator_distance_probe(&h, &h.with_constant(c), &u, 1.3).unwrap();
        assert!((d - 2.0 * (c * 1.3 / 2.0).sin().abs()).abs() < 1e-12);
        let mut bad = u.clone();
        bad.coeffs_mut()[0] = C64::new(0.5, 0.0);
        assert!(propagator_distance_probe(&h, &h, &bad, 1.0).is_err());
    }

    #[test]
    fn duhamel_identity_and_bounds() {
        let n = 400;
        let u = EquatorialHarmonic::new(n, 2);
        let cut = EquatorialCutoff::new(4, 0.5, 0.01).unwrap();
        let grid = Arc::new(ZonalGrid::equatorial(&cut.features(), cut.delta / 16.0, 0.6, 16));
        let phi = grid.sample(|t| cut.value(t));
        let zero = GridField::zeros(grid.clone());
        let d = duhamel_diagnostics(&u, &zero, &phi, 0.5, 2.0).unwrap();
        assert_eq!(d.residual, 0.0);
        assert!((d.deficiency.powi(2) - d.deficiency_identity).abs() < 1e-12);
        assert!(d.duhamel_residual <= d.residual_bound + 1e-15);
        // concentration: more mass in the core at higher degree
        let d2 = duhamel_diagnostics(&EquatorialHarmonic::new(4 * n, 2), &zero, &phi, 0.5, 2.0).unwrap();
        assert!(d2.deficiency < d.deficiency);
        // a non-constant V gives a positive residual, still bounded
        let v = grid.sample(|t| t.cos().powi(2));
        let dv = duhamel_diagnostics(&u, &v, &phi, 0.5, 2.0).unwrap();
        assert!(dv.residual > 0.0);
        assert!(dv.duhamel_residual <= dv.residual_bound * (1.0 + 1e-12));
    }

    #[test]
    fn linfty_examples() {
        let h = free_sphere_block(3, 16, 0).unwrap();
        let u = SpectralState::unit(h.basis(), ModeIndex::Sphere { l: 3, m: 3 }).unwrap();
        let grid = Arc::new(ZonalGrid::gauss(40));
        let (m0, b0) = linfty_stability_check(&h, &GridField::zeros(grid.clone()), &u, 1.0).unwrap();
        assert_eq!((m0, b0), (0.0, 0.0));
        let c = 0.25;
        let (mc, bc) = linfty_stability_check(&h, &grid.sample(|_| c), &u, 1.0).unwrap();
        assert!((mc - 2.0 * (c / 2.0).sin()).abs() < 1e-12);
        assert!(mc <= bc);
        let (mw, bw) = linfty_stability_check(&h, &grid.sample(|t| (3.0 * t).sin()), &u, 0.1).unwrap();
        assert!(mw <= bw + 1e-8);
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let xs: Vec<f64> = (0..=8).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x * x - x).collect();
        assert!((simpson(&ys, 0.25) - (4.0 - 2.0)).abs() < 1e-13);
    }
}
