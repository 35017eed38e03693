//! Concentrating eigenfunctions and their limit measures.
//!
//! On S² the equatorial harmonics `u_n ∝ (x₁ + i x₂)ⁿ = sinⁿθ e^{inφ}` are
//! exact eigenfunctions of `−Δ` with eigenvalue `n(n+1)` whose densities
//! `|u_n|² dμ` converge weak-* to `dθ/2π` on the equator. On a surface of
//! revolution the ground radial modes of high angular order concentrate on the
//! circle where the profile `f` is smallest.

pub(crate) mod sturm;

use std::f64::consts::PI;
use std::sync::Arc;

pub use sturm::{
    concentration_profile, mass_in_window, pencil_residual, radial_pairing, solve_sturm_liouville,
    SturmLiouvilleMode,
};

use crate::discretization::{GridField, Quadrature, SphereGrid, ZonalGrid};
use crate::discretization::legendre::ln_sin;
use crate::special::ln_gamma_ratio;
use crate::{Error, Result, C64};

/// `ln ‖e_n‖²_{L²(S^d)}` for `e_n = (x₁ + i x₂)ⁿ|_{S^d}`.
///
/// `‖e_n‖² = 2π^{(d+1)/2} Γ(n+1) / Γ(n + (d+1)/2)`.
pub fn ln_closed_form_norm(n: usize, d: usize) -> f64 {
    assert!(d >= 2, "sphere dimension must be at least 2");
    let half = (d as f64 - 1.0) / 2.0;
    2f64.ln() + 0.5 * (d as f64 + 1.0) * PI.ln() - ln_gamma_ratio(n as f64 + 1.0, half)
}

/// `‖e_n‖²_{L²(S^d)}`; at `d = 2` this is `4π·4ⁿ(n!)²/(2n+1)!`.
pub fn closed_form_norm(n: usize, d: usize) -> f64 {
    ln_closed_form_norm(n, d).exp()
}

/// The eigenvalue `n(n + d − 1)` of `−Δ_{S^d}` on `e_n`.
pub fn equatorial_eigenvalue(n: usize, d: usize) -> f64 {
    n as f64 * (n + d - 1) as f64
}

/// The normalized equatorial harmonic `u_n = e_n / ‖e_n‖` on S^d.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquatorialHarmonic {
    pub n: usize,
    pub d: usize,
    ln_norm_sqr: f64,
}

impl EquatorialHarmonic {
    pub fn new(n: usize, d: usize) -> Self {
        Self { n, d, ln_norm_sqr: ln_closed_form_norm(n, d) }
    }

    pub fn eigenvalue(&self) -> f64 {
        equatorial_eigenvalue(self.n, self.d)
    }

    /// `‖e_n‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.ln_norm_sqr.exp()
    }

    /// `|u_n|` at colatitude θ on S² (underflows cleanly to 0 far from the equator).
    pub fn modulus(&self, theta: f64) -> f64 {
        let ln = self.n as f64 * ln_sin(theta) - 0.5 * self.ln_norm_sqr;
        if ln < -745.0 {
            0.0
        } else {
            ln.exp()
        }
    }

    /// `|u_n|²` at colatitude θ on S².
    pub fn density(&self, theta: f64) -> f64 {
        let ln = 2.0 * self.n as f64 * ln_sin(theta) - self.ln_norm_sqr;
        if ln < -745.0 {
            0.0
        } else {
            ln.exp()
        }
    }

    /// `u_n(θ, φ)` on S².
    pub fn value(&self, theta: f64, phi: f64) -> C64 {
        C64::from_polar(self.modulus(theta), self.n as f64 * phi)
    }

    /// Its `|u_n|²` sampled on a zonal rule.
    pub fn density_on(&self, grid: &Arc<ZonalGrid>) -> GridField<ZonalGrid> {
        grid.sample(|t| self.density(t))
    }

    /// Natural width of the equatorial band: the `cos θ`-spread of `|u_n|²`.
    pub fn width(&self) -> f64 {
        1.0 / (2.0 * self.n as f64 + 3.0).sqrt()
    }
}

/// Build `u_n` on S² and sample it on `grid`.
pub fn make_equatorial(n: usize, grid: &Arc<SphereGrid>) -> Result<(EquatorialHarmonic, GridField<SphereGrid>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("equatorial harmonics start at n = 1".into()));
    }
    if 2 * n + 1 > grid.exactness_degree() {
        return Err(Error::Resolution(format!(
            "degree {n} needs quadrature exactness ≥ {}, grid has {}",
            2 * n + 1,
            grid.exactness_degree()
        )));
    }
    let u = EquatorialHarmonic::new(n, 2);
    let field = grid.sample(|t, p| u.value(t, p));
    Ok((u, field))
}

/// `∫ f |u|² dμ` (real part; `f` is a real test function).
pub fn measure_pairing<G: Quadrature>(f: &GridField<G>, u: &GridField<G>) -> Result<f64> {
    f.check_same_grid(u)?;
    Ok(f.grid()
        .weights()
        .iter()
        .zip(f.values().iter().zip(u.values()))
        .map(|(w, (f, u))| w * f.re * u.norm_sqr())
        .sum())
}

/// The limit measure of a concentrating sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConcentrationMeasure {
    /// `dθ/2π` on the equator `{θ = π/2}` of S².
    EquatorCircle,
    /// `δ_{t₀} ⊗ dθ/2π` on a surface of revolution.
    Circle { t0: f64 },
}

impl ConcentrationMeasure {
    /// `ν(M)`; both limits are probability measures.
    pub fn total_mass(&self) -> f64 {
        1.0
    }

    /// `ν(Γ)` for the circle Γ carrying the measure.
    pub fn mass_of_support(&self) -> f64 {
        1.0
    }

    /// `∫ f dν` for a test function `f(first, angle)`, where `first` is the
    /// colatitude on S² or `t` on the cylinder; trapezoid rule with `n_angle` nodes.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64, n_angle: usize) -> f64 {
        let first = match *self {
            ConcentrationMeasure::EquatorCircle => PI / 2.0,
            ConcentrationMeasure::Circle { t0 } => t0,
        };
        (0..n_angle).map(|j| f(first, 2.0 * PI * j as f64 / n_angle as f64)).sum::<f64>() / n_angle as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakStarGap {
    pub pairing: f64,
    pub equator_average: f64,
    pub gap: f64,
}

/// `|∫ f |u_n|² dμ − (1/2π)∫ f(equator) dθ|` for a real test function on S².
///
/// The equator average uses the grid's longitude nodes.
pub fn weakstar_limit_gap(f: impl Fn(f64, f64) -> f64, n: usize, grid: &Arc<SphereGrid>) -> Result<WeakStarGap> {
    let (_, u) = make_equatorial(n, grid)?;
    let test = grid.sample_real(&f);
    let pairing = measure_pairing(&test, &u)?;
    let equator_average = ConcentrationMeasure::EquatorCircle.integrate(&f, grid.n_phi());
    Ok(WeakStarGap { pairing, equator_average, gap: (pairing - equator_average).abs() })
}

/// `‖(−Δ − n(n+1)) u_n‖_{L²(S²)}` measured through the spherical-harmonic
/// transform truncated at `l_max`.
pub fn spectral_residual(n: usize, l_max: usize, grid: &Arc<SphereGrid>) -> Result<f64> {
    let (u, field) = make_equatorial(n, grid)?;
    let coeffs = grid.analyze(&field, l_max)?;
    let lambda = u.eigenvalue();
    let basis = coeffs.basis();
    let mut acc = 0.0;
    for (pos, c) in coeffs.coeffs().iter().enumerate() {
        if let Some(crate::discretization::ModeIndex::Sphere { l, .. }) = basis.mode(pos) {
            let k = (l * (l + 1)) as f64 - lambda;
            acc += k * k * c.norm_sqr();
        }
    }
    Ok(acc.sqrt())
}
