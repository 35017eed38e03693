use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::{gauss_legendre, GridField, Quadrature};
use crate::C64;

/// A colatitude rule for axisymmetric integrands on S².
///
/// Weights already include `2π sin θ`, so `Σ wᵢ f(θᵢ) ≈ ∫_{S²} f dμ` for any
/// `f` independent of longitude.
#[derive(Clone, Debug, PartialEq)]
pub struct ZonalGrid {
    theta: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature for ZonalGrid {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl ZonalGrid {
    pub(crate) fn from_rule(theta: Vec<f64>, weights: Vec<f64>) -> Self {
        Self { theta, weights }
    }

    /// Gauss–Legendre in `cos θ`: exact for polynomials in `cos θ` of degree `≤ 2n − 1`.
    pub fn gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let theta = x.iter().rev().map(|x| x.acos()).collect();
        let weights = w.iter().rev().map(|w| 2.0 * PI * w).collect();
        Self { theta, weights }
    }

    /// Composite Gauss–Legendre in θ over the panels delimited by `breaks`
    /// (clipped to `[0, π]`, sorted, deduplicated; the ends are always added).
    pub fn composite(breaks: &[f64], nodes_per_panel: usize) -> Self {
        let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && *b < PI).collect();
        pts.push(0.0);
        pts.push(PI);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
        let (x, w) = gauss_legendre(nodes_per_panel);
        let mut theta = Vec::with_capacity((pts.len() - 1) * nodes_per_panel);
        let mut weights = Vec::with_capacity(theta.capacity());
        for p in pts.windows(2) {
            let (lo, hi) = (p[0], p[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                let t = mid + half * xi;
                theta.push(t);
                weights.push(2.0 * PI * wi * half * t.sin());
            }
        }
        Self { theta, weights }
    }

    /// Composite rule refined around the equator.
    ///
    /// Panels of width `fine_width` cover `|θ − π/2| ≤ fine_radius`; beyond
    /// that panel widths grow geometrically toward the poles. `features` are
    /// extra equatorial offsets (placed symmetrically) where the integrand
    /// has a kink or a fast transition.
    pub fn equatorial(features: &[f64], fine_width: f64, fine_radius: f64, nodes_per_panel: usize) -> Self {
        assert!(fine_width > 0.0, "equatorial: fine_width must be positive");
        let mut offsets: Vec<f64> = features.iter().map(|f| f.abs()).filter(|f| *f < FRAC_PI_2).collect();
        let radius = fine_radius.min(FRAC_PI_2);
        let count = (radius / fine_width).ceil() as usize;
        let step = radius / count.max(1) as f64;
        offsets.extend((1..=count).map(|j| j as f64 * step));
        let mut s = step;
        let mut r = radius;
        while r < FRAC_PI_2 {
            s *= 1.5;
            r += s;
            offsets.push(r.min(FRAC_PI_2));
        }
        let mut breaks = vec![FRAC_PI_2];
        for o in offsets {
            breaks.push(FRAC_PI_2 - o);
            breaks.push(FRAC_PI_2 + o);
        }
        Self::composite(&breaks, nodes_per_panel)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    pub fn sample(self: &Arc<Self>, f: impl Fn(f64) -> f64) -> GridField<Self> {
        let values = self.theta.iter().map(|&t| C64::new(f(t), 0.0)).collect();
        GridField { grid: self.clone(), values }
    }

    pub fn sample_complex(self: &Arc<Self>, f: impl Fn(f64) -> C64) -> GridField<Self> {
        let values = self.theta.iter().map(|&t| f(t)).collect();
        GridField { grid: self.clone(), values }
    }
}
