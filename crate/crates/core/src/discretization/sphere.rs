use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::legendre;
use super::{GridField, ModeBasis, Quadrature, SpectralState, ZonalGrid};
use crate::{Error, Result, C64};

/// Gauss–Legendre (in `cos θ`) × equispaced longitude grid on the unit sphere.
///
/// Colatitude convention: `θ ∈ [0, π]` from the north pole, equator at `θ = π/2`,
/// `dμ = sin θ dθ dφ`. Point `(i, j)` is stored at `i·n_phi + j`, rings ordered
/// by increasing θ.
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
    theta: Vec<f64>,
    ring_weights: Vec<f64>,
    weights: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SphereGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereGrid").field("n_theta", &self.n_theta).field("n_phi", &self.n_phi).finish()
    }
}

impl Quadrature for SphereGrid {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Resolution("sphere grid needs n_theta, n_phi > 0".into()));
        }
        let (x, w) = super::gauss_legendre(n_theta);
        // ascending θ means descending x
        let theta: Vec<f64> = x.iter().rev().map(|&x| x.acos()).collect();
        let ring_weights: Vec<f64> = w.iter().rev().copied().collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let weights = ring_weights.iter().flat_map(|&w| std::iter::repeat_n(w * dphi, n_phi)).collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_theta,
            n_phi,
            theta,
            ring_weights,
            weights,
            fft: planner.plan_fft_forward(n_phi),
            ifft: planner.plan_fft_inverse(n_phi),
        })
    }

    /// Smallest grid that resolves degree `l_max` exactly.
    pub fn for_degree(l_max: usize) -> Result<Self> {
        Self::new(l_max + 1, 2 * l_max + 1)
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    /// Gauss weights in `cos θ` (they sum to 2).
    pub fn ring_weights(&self) -> &[f64] {
        &self.ring_weights
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.theta[idx / self.n_phi], self.phi(idx % self.n_phi))
    }

    /// Highest polynomial degree in `cos θ` integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        2 * self.n_theta - 1
    }

    pub fn sample(self: &Arc<Self>, f: impl Fn(f64, f64) -> C64) -> GridField<Self> {
        let values = (0..self.weights.len())
            .map(|idx| {
                let (t, p) = self.point(idx);
                f(t, p)
            })
            .collect();
        GridField { grid: self.clone(), values }
    }

    pub fn sample_real(self: &Arc<Self>, f: impl Fn(f64, f64) -> f64) -> GridField<Self> {
        self.sample(|t, p| C64::new(f(t, p), 0.0))
    }

    /// The colatitude rule underlying this grid, with weights `2π wᵢ`.
    pub fn zonal(&self) -> ZonalGrid {
        ZonalGrid::from_rule(self.theta.clone(), self.ring_weights.iter().map(|w| 2.0 * PI * w).collect())
    }

    /// Extract the colatitude profile of an axisymmetric field.
    ///
    /// Rejects fields whose largest deviation from the ring mean exceeds
    /// `1e-12 · max(1, ‖f‖∞)`.
    pub fn zonal_profile(&self, field: &GridField<SphereGrid>) -> Result<GridField<ZonalGrid>> {
        if field.grid.n_theta != self.n_theta || field.grid.n_phi != self.n_phi {
            return Err(Error::GridMismatch);
        }
        let scale = field.max_abs().max(1.0);
        let mut spread: f64 = 0.0;
        let mut profile = Vec::with_capacity(self.n_theta);
        for ring in field.values.chunks(self.n_phi) {
            let mean = ring.iter().sum::<C64>() / self.n_phi as f64;
            spread = ring.iter().map(|v| (v - mean).norm()).fold(spread, f64::max);
            profile.push(mean);
        }
        if spread > 1e-12 * scale {
            return Err(Error::NotAxisymmetric(spread));
        }
        GridField::new(Arc::new(self.zonal()), profile)
    }

    fn check_degree(&self, l_max: usize) -> Result<()> {
        if self.n_theta < l_max + 1 || self.n_phi < 2 * l_max + 1 {
            return Err(Error::Resolution(format!(
                "degree {l_max} needs n_theta ≥ {} and n_phi ≥ {} (have {} × {})",
                l_max + 1,
                2 * l_max + 1,
                self.n_theta,
                self.n_phi
            )));
        }
        Ok(())
    }

    /// Coefficients `c_{l,m} = ⟨Y_{l,m}, f⟩` for `l ≤ l_max`.
    pub fn analyze(&self, field: &GridField<SphereGrid>, l_max: usize) -> Result<SpectralState> {
        self.check_degree(l_max)?;
        if field.grid.n_theta != self.n_theta || field.grid.n_phi != self.n_phi {
            return Err(Error::GridMismatch);
        }
        let basis = ModeBasis::Sphere { l_max };
        let mut coeffs = vec![C64::new(0.0, 0.0); basis.len()];
        let dphi = 2.0 * PI / self.n_phi as f64;
        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut ring = vec![C64::new(0.0, 0.0); self.n_phi];
        let mut col = vec![0.0; l_max + 1];
        for (i, &theta) in self.theta.iter().enumerate() {
            ring.copy_from_slice(&field.values[i * self.n_phi..(i + 1) * self.n_phi]);
            self.fft.process(&mut ring);
            let w = self.ring_weights[i] * dphi * norm;
            for am in 0..=l_max {
                let col = &mut col[..l_max - am + 1];
                legendre::column_into(am, l_max, theta, col);
                for (sgn, m) in signed_orders(am) {
                    let fm = ring[order_slot(m, self.n_phi)] * w;
                    for (j, &p) in col.iter().enumerate() {
                        let l = am + j;
                        coeffs[sphere_pos(l, m)] += fm * (sgn * p);
                    }
                }
            }
        }
        SpectralState::new(basis, coeffs)
    }

    /// Pointwise evaluation `Σ c_{l,m} Y_{l,m}` on the grid.
    pub fn synthesize(self: &Arc<Self>, state: &SpectralState) -> Result<GridField<SphereGrid>> {
        let l_max = match state.basis() {
            ModeBasis::Sphere { l_max } => l_max,
            other => return Err(Error::InvalidParameter(format!("expected a sphere basis, got {other:?}"))),
        };
        self.check_degree(l_max)?;
        let c = state.coeffs();
        let norm = 1.0 / (2.0 * PI).sqrt();
        let mut values = vec![C64::new(0.0, 0.0); self.weights.len()];
        let mut col = vec![0.0; l_max + 1];
        for (i, &theta) in self.theta.iter().enumerate() {
            let ring = &mut values[i * self.n_phi..(i + 1) * self.n_phi];
            for am in 0..=l_max {
                let col = &mut col[..l_max - am + 1];
                legendre::column_into(am, l_max, theta, col);
                for (sgn, m) in signed_orders(am) {
                    let mut g = C64::new(0.0, 0.0);
                    for (j, &p) in col.iter().enumerate() {
                        g += c[sphere_pos(am + j, m)] * (sgn * p);
                    }
                    ring[order_slot(m, self.n_phi)] += g * norm;
                }
            }
            self.ifft.process(ring);
        }
        Ok(GridField { grid: self.clone(), values })
    }
}

fn sphere_pos(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

fn order_slot(m: i64, n_phi: usize) -> usize {
    if m < 0 {
        (n_phi as i64 + m) as usize
    } else {
        m as usize
    }
}

/// `(sign of the θ-factor, signed order)` for `±am`.
fn signed_orders(am: usize) -> impl Iterator<Item = (f64, i64)> {
    let neg_sign = if am % 2 == 1 { -1.0 } else { 1.0 };
    let m = am as i64;
    std::iter::once((1.0, m)).chain((am > 0).then_some((neg_sign, -m)))
}
