use rayon::prelude::*;

use super::{l2_norm, EvolutionResult, Method};
use crate::discretization::{BoxGrid, GridField};
use crate::{Error, Result, C64};

/// Guard-band mass above which a box evolution is flagged invalid.
pub const BOUNDARY_MASS_TOL: f64 = 1e-8;

/// Steps keeping the potential phase per step `δ‖V‖_∞ ≤ 0.1`.
pub fn default_steps(v_total: &GridField<BoxGrid>, t: f64) -> usize {
    ((t.abs() * v_total.max_abs()) / 0.1).ceil().max(1.0) as usize
}

/// Strang splitting `e^{−iδV/2} F⁻¹ e^{−iδ|ξ|²} F e^{−iδV/2}`, `steps` times.
///
/// `guard` is the width of the boundary band whose mass is monitored; the
/// initial state must carry essentially none of it.
pub fn evolve_splitstep(
    v_total: &GridField<BoxGrid>,
    u0: &GridField<BoxGrid>,
    t: f64,
    steps: usize,
    guard: f64,
) -> Result<EvolutionResult<GridField<BoxGrid>>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("split-step needs at least one step".into()));
    }
    v_total.check_same_grid(u0)?;
    let grid = u0.grid().clone();
    let start_mass = grid.guard_mass(u0, guard);
    if start_mass > BOUNDARY_MASS_TOL {
        return Err(Error::InvalidParameter(format!("initial state has guard-band mass {start_mass:.3e}")));
    }
    let dt = t / steps as f64;
    let total = (grid.n() as f64).powi(3);
    let kinetic: Vec<C64> =
        grid.wavenumber_sqr().into_par_iter().map(|k2| C64::from_polar(1.0 / total, -dt * k2)).collect();
    let has_potential = v_total.values().iter().any(|v| *v != C64::new(0.0, 0.0));
    let phase = |fraction: f64| -> Vec<C64> {
        v_total.values().par_iter().map(|v| (C64::new(0.0, -fraction * dt) * v).exp()).collect()
    };
    let (half, full) = if has_potential { (phase(0.5), phase(1.0)) } else { (Vec::new(), Vec::new()) };
    let mul = |data: &mut [C64], f: &[C64]| data.par_iter_mut().zip(f).for_each(|(d, f)| *d *= f);

    let mut psi = u0.values().to_vec();
    if has_potential {
        mul(&mut psi, &half);
    }
    for s in 0..steps {
        grid.fft_forward(&mut psi);
        mul(&mut psi, &kinetic);
        grid.fft_inverse(&mut psi);
        if has_potential {
            // adjacent half steps merge into one full step
            mul(&mut psi, if s + 1 == steps { &half } else { &full });
        }
    }
    let defect = (l2_norm(&psi) - l2_norm(u0.values())).abs() * grid.spacing().powf(1.5);
    let state = GridField::new(grid.clone(), psi)?;
    let boundary = grid.guard_mass(&state, guard);
    Ok(EvolutionResult {
        state,
        time: t,
        method: Method::SplitStep,
        steps,
        krylov_dim: None,
        unitarity_defect: defect,
        boundary_mass: Some(boundary),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn gaussian(grid: &Arc<BoxGrid>, s: f64, t: f64) -> GridField<BoxGrid> {
        // free solution of i∂ₜψ = −Δψ from a Gaussian of width s
        let c = grid.center();
        let z = C64::new(s * s, t);
        let pref = (2.0 * PI * s * s).powf(-0.75) * (C64::new(s * s, 0.0) / z).powf(1.5);
        grid.sample(|x| {
            let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
            pref * (-r2 / (4.0 * z)).exp()
        })
    }

    #[test]
    fn free_gaussian_matches_closed_form() {
        let grid = Arc::new(BoxGrid::new(30.0, 64).unwrap());
        let u0 = gaussian(&grid, 1.0, 0.0);
        let zero = GridField::zeros(grid.clone());
        let r = evolve_splitstep(&zero, &u0, 1.0, 1, 2.0).unwrap();
        let exact = gaussian(&grid, 1.0, 1.0);
        let err = r.state.distance(&exact).unwrap();
        assert!(err < 1e-8, "{err:e}");
        assert!(r.unitarity_defect < 1e-12);
        assert!(r.is_valid());
    }

    #[test]
    fn constant_potential_plane_wave_phase() {
        let grid = Arc::new(BoxGrid::new(8.0, 16).unwrap());
        let k = [1.0, -2.0, 3.0];
        let xi: Vec<f64> = k.iter().map(|k| 2.0 * PI * k / 8.0).collect();
        let u0 = grid.sample(|x| C64::from_polar(8f64.powf(-1.5), xi.iter().zip(&x).map(|(a, b)| a * b).sum()));
        let c = 0.8;
        let v = grid.sample_real(|_| c);
        let t = 0.3;
        // plane waves fill the box, so there is no guard band to speak of
        let r = evolve_splitstep(&v, &u0, t, 7, 0.0).unwrap();
        let omega = xi.iter().map(|x| x * x).sum::<f64>() + c;
        let phase = C64::from_polar(1.0, -omega * t);
        let err = r.state.distance(&u0.map(|z| z * phase)).unwrap();
        assert!(err < 1e-12, "{err:e}");
    }

    #[test]
    fn second_order_refinement() {
        let grid = Arc::new(BoxGrid::new(16.0, 32).unwrap());
        let c = grid.center();
        let u0 = grid.sample(|x| {
            let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
            C64::new((-r2 / 2.0).exp() * (0.5 * PI).powf(-0.75) / 2f64.powf(0.75), 0.0)
        });
        let v = grid.sample_real(|x| 3.0 * (-(x[0] - c[0] - 0.5).powi(2) - (x[1] - c[1]).powi(2)).exp());
        let t = 0.5;
        let base = 8;
        let reference = evolve_splitstep(&v, &u0, t, 8 * base, 1.0).unwrap().state;
        let e1 = evolve_splitstep(&v, &u0, t, base, 1.0).unwrap().state.distance(&reference).unwrap();
        let e2 = evolve_splitstep(&v, &u0, t, 2 * base, 1.0).unwrap().state.distance(&reference).unwrap();
        let ratio = e1 / e2;
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejects_mass_in_guard_band() {
        let grid = Arc::new(BoxGrid::new(8.0, 16).unwrap());
        let u0 = grid.sample_real(|_| 1.0);
        assert!(evolve_splitstep(&GridField::zeros(grid.clone()), &u0, 0.1, 1, 1.0).is_err());
        assert!(evolve_splitstep(&GridField::zeros(grid), &u0, 0.1, 0, 1.0).is_err());
    }
}
