//! Perturbation families and their `L^p` accounting.
//!
//! * [`EquatorialCutoff`]: `κφ_k` on S², equal to `κ` on a band around the
//!   equator and supported in a band of area below `1/k`.
//! * [`ScaledBumpPair`]: on the box, `u⁰_n(x) = n^{3/2} u₀(n x)` together with
//!   `W_n(x) = n² ln(n+1) W₀(n x)`, where `W₀ ≡ 1` on a neighbourhood of
//!   `supp u₀`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use crate::discretization::{gauss_legendre, BoxGrid, GridField, Quadrature, SphereGrid, ZonalGrid};
use crate::{Error, Result, C64};

/// Smooth transition: 0 for `s ≤ 0`, 1 for `s ≥ 1`, `C^∞` in between.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

/// `exp(−1/(1−s²))` on `|s| < 1`, zero outside.
pub fn mollifier(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// `L^p` norm by quadrature; `p = f64::INFINITY` gives the max over samples.
pub fn lp_norm<G: Quadrature>(field: &GridField<G>, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("L^p norm needs p ≥ 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(field.max_abs());
    }
    let s: f64 = field.grid().weights().iter().zip(field.values()).map(|(w, v)| w * v.norm().powf(p)).sum();
    Ok(s.powf(1.0 / p))
}

/// The cutoff `φ_k` around the equator of S², scaled by `κ`.
///
/// `φ_k = 1` for `|θ − π/2| ≤ δ_k/2`, `φ_k = 0` for `|θ − π/2| ≥ δ_k`, with
/// `4π sin δ_k = (1 − margin)/k`, the exact area of the support band.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquatorialCutoff {
    pub k: usize,
    pub kappa: f64,
    pub margin: f64,
    /// half-width of the support band in colatitude
    pub delta: f64,
}

impl EquatorialCutoff {
    pub fn new(k: usize, kappa: f64, margin: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("cutoff index k must be ≥ 1".into()));
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::InvalidParameter(format!("κ must lie in (0, 1], got {kappa}")));
        }
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::InvalidParameter(format!("margin must lie in [0, 1), got {margin}")));
        }
        let area = (1.0 / k as f64).min(4.0 * PI) * (1.0 - margin);
        let delta = (area / (4.0 * PI)).min(1.0).asin();
        Ok(Self { k, kappa, margin, delta })
    }

    /// `φ_k(θ)` (without κ).
    pub fn value(&self, theta: f64) -> f64 {
        let off = (theta - FRAC_PI_2).abs();
        smooth_step((self.delta - off) / (0.5 * self.delta))
    }

    pub fn core_half_width(&self) -> f64 {
        0.5 * self.delta
    }

    /// `μ(supp φ_k) = 4π sin δ_k`.
    pub fn support_area(&self) -> f64 {
        4.0 * PI * self.delta.sin()
    }

    /// Equatorial offsets where `φ_k` bends: the core edge, the support edge
    /// and eight points across the ramp.
    pub fn features(&self) -> Vec<f64> {
        (0..=8).map(|i| self.delta * (0.5 + i as f64 / 16.0)).collect()
    }

    /// A zonal rule that resolves `φ_k` itself.
    pub fn zonal_grid(&self) -> ZonalGrid {
        ZonalGrid::equatorial(&self.features(), self.delta / 2.0, self.delta, 16)
    }

    /// A zonal rule resolving both `φ_k` and the equatorial harmonic `u_n`:
    /// panels of width `σ/4` out to `12σ` (`σ = 1/√(2n)`) plus breaks every
    /// `δ/32` across the ramp.
    pub fn zonal_grid_for(&self, n: usize) -> ZonalGrid {
        let sigma = 1.0 / (2.0 * n.max(1) as f64).sqrt();
        let ramp: Vec<f64> = (0..=16).map(|i| self.delta * (0.5 + i as f64 / 32.0)).collect();
        ZonalGrid::equatorial(&ramp, sigma / 4.0, 12.0 * sigma, 16)
    }

    /// `κφ_k` on a zonal rule.
    pub fn sample_zonal(&self, grid: &Arc<ZonalGrid>) -> GridField<ZonalGrid> {
        grid.sample(|t| self.kappa * self.value(t))
    }

    /// `κφ_k` on a full sphere grid.
    pub fn sample_sphere(&self, grid: &Arc<SphereGrid>) -> GridField<SphereGrid> {
        grid.sample_real(|t, _| self.kappa * self.value(t))
    }

    /// Support indicator `1{|θ − π/2| < δ_k}` integrated exactly: `4π sin δ_k`.
    pub fn support_indicator_area(&self, grid: &ZonalGrid) -> f64 {
        grid.thetas()
            .iter()
            .zip(grid.weights())
            .filter(|(t, _)| (*t - FRAC_PI_2).abs() < self.delta)
            .map(|(_, w)| w)
            .sum()
    }
}

/// Build `κφ_k` and sample it on a sphere grid.
pub fn make_equatorial_cutoff(
    k: usize,
    kappa: f64,
    grid: &Arc<SphereGrid>,
) -> Result<(EquatorialCutoff, GridField<SphereGrid>)> {
    let c = EquatorialCutoff::new(k, kappa, DEFAULT_MARGIN)?;
    let field = c.sample_sphere(grid);
    Ok((c, field))
}

/// Relative slack kept below the `1/k` support bound.
pub const DEFAULT_MARGIN: f64 = 0.01;

/// Radial composite Gauss rule on `[0, r]` for `∫ g(ρ) ρ² dρ`.
fn radial_integral(r: f64, g: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(16);
    let panels = 256;
    let hw = 0.5 * r / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = (2 * p + 1) as f64 * hw;
            x.iter().zip(&w).map(|(x, w)| {
                let rho = mid + hw * x;
                w * hw * rho * rho * g(rho)
            }).sum::<f64>()
        })
        .sum()
}

/// Base profiles at scale 1: `u₀ = c·exp(−1/(1−|x/r_u|²))` on `|x| < r_u` and
/// `W₀ = 1` on `|x| ≤ 2r_u`, decaying smoothly to 0 at `3r_u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaseProfile {
    pub r_u: f64,
    /// `c` with `‖u₀‖_{L²(ℝ³)} = 1`
    pub amplitude: f64,
}

impl BaseProfile {
    pub fn new(r_u: f64) -> Result<Self> {
        if !(r_u > 0.0) {
            return Err(Error::InvalidParameter(format!("base radius must be positive, got {r_u}")));
        }
        let s = 4.0 * PI * radial_integral(r_u, |rho| mollifier(rho / r_u).powi(2));
        Ok(Self { r_u, amplitude: 1.0 / s.sqrt() })
    }

    pub fn u0(&self, rho: f64) -> f64 {
        self.amplitude * mollifier(rho / self.r_u)
    }

    pub fn w0(&self, rho: f64) -> f64 {
        smooth_step((3.0 * self.r_u - rho) / self.r_u)
    }

    /// `‖W₀‖_{L^p(ℝ³)}` from a 1-D radial quadrature (independent of any box grid).
    pub fn w0_lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return 1.0;
        }
        (4.0 * PI * radial_integral(3.0 * self.r_u, |rho| self.w0(rho).powf(p))).powf(1.0 / p)
    }

    /// `‖Δu₀‖_{L²(ℝ³)}`, radial form `Δu = u″ + 2u′/ρ`.
    pub fn laplacian_u0_norm(&self) -> f64 {
        let r = self.r_u;
        let lap = |rho: f64| {
            let s = rho / r;
            if s >= 1.0 {
                return 0.0;
            }
            let q = 1.0 - s * s;
            let e = (-1.0 / q).exp();
            // d/ds e = −2s/q² e ; d²/ds² e = e·(4s²/q⁴ − (2q² + 8s²q)/q⁴)
            let d1 = -2.0 * s / (q * q) * e;
            let d2 = e * (4.0 * s * s - 2.0 * q * q - 8.0 * s * s * q) / q.powi(4);
            let radial = if s > 0.0 { 2.0 * d1 / s } else { 2.0 * d2 };
            self.amplitude * (d2 + radial) / (r * r)
        };
        (4.0 * PI * radial_integral(r, |rho| lap(rho).powi(2))).sqrt()
    }
}

/// `u⁰_n` and `W_n` about the box centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledBumpPair {
    pub n: usize,
    pub base: BaseProfile,
    pub center: [f64; 3],
    /// `n² ln(n+1)`, the value of `W_n` on `supp u⁰_n`
    pub amplitude: f64,
    pub u_support_radius: f64,
    pub w_plateau_radius: f64,
    pub w_support_radius: f64,
}

impl ScaledBumpPair {
    pub fn new(n: usize, base: BaseProfile, center: [f64; 3]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("scale index n must be ≥ 1".into()));
        }
        let nf = n as f64;
        Ok(Self {
            n,
            base,
            center,
            amplitude: nf * nf * (nf + 1.0).ln(),
            u_support_radius: base.r_u / nf,
            w_plateau_radius: 2.0 * base.r_u / nf,
            w_support_radius: 3.0 * base.r_u / nf,
        })
    }

    fn radius(&self, x: [f64; 3]) -> f64 {
        let d: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c).powi(2)).sum();
        d.sqrt()
    }

    pub fn u(&self, x: [f64; 3]) -> f64 {
        let nf = self.n as f64;
        nf.powf(1.5) * self.base.u0(nf * self.radius(x))
    }

    pub fn w(&self, x: [f64; 3]) -> f64 {
        self.amplitude * self.base.w0(self.n as f64 * self.radius(x))
    }

    /// Critical time `π / (n² ln(n+1))` at which `W_n` rotates the phase on
    /// `supp u⁰_n` by exactly π.
    pub fn critical_time(&self) -> f64 {
        PI / self.amplitude
    }
}

/// Sample `u⁰_n` (renormalized to unit grid norm) and `W_n` on `grid`.
///
/// Requires at least 8 grid spacings across `supp u⁰_n` and `supp W_n` to sit
/// inside the box with `guard` clearance from every face.
pub fn make_scaled_pair(
    n: usize,
    grid: &Arc<BoxGrid>,
    base: BaseProfile,
    guard: f64,
) -> Result<(ScaledBumpPair, GridField<BoxGrid>, GridField<BoxGrid>)> {
    let pair = ScaledBumpPair::new(n, base, grid.center())?;
    let across = 2.0 * pair.u_support_radius / grid.spacing();
    if across < 8.0 - 1e-9 {
        return Err(Error::Resolution(format!(
            "supp u⁰_{n} spans {across:.2} grid spacings, need at least 8"
        )));
    }
    if pair.w_support_radius + guard > 0.5 * grid.side() {
        return Err(Error::SupportOverflow(format!(
            "supp W_{n} radius {:.4} plus guard {guard:.4} exceeds half side {:.4}",
            pair.w_support_radius,
            0.5 * grid.side()
        )));
    }
    let mut u = grid.sample_real(|x| pair.u(x));
    let norm = u.norm();
    u.scale(C64::new(1.0 / norm, 0.0));
    let w = grid.sample_real(|x| pair.w(x));
    Ok((pair, u, w))
}
