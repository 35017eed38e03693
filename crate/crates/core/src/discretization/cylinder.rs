use std::f64::consts::PI;
use std::sync::Arc;

use super::{GridField, Quadrature};
use crate::{Error, Result, C64};

/// Uniform grid on the surface of revolution `[a, b] × S¹` with metric
/// `dt² + f(t)² dθ²` and Dirichlet ends.
///
/// Radial nodes `tᵢ = a + i·h`, `i = 1 ..= n_t`, `h = (b − a)/(n_t + 1)`;
/// `n_angle` equispaced angles. The measure is `f(t) dt dθ`.
#[derive(Clone, Debug)]
pub struct CylinderGrid {
    a: f64,
    b: f64,
    n_t: usize,
    n_angle: usize,
    /// profile at all `n_t + 2` nodes including both ends
    profile: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature for CylinderGrid {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl CylinderGrid {
    pub fn new(a: f64, b: f64, n_t: usize, n_angle: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(b > a) || n_t < 2 || n_angle == 0 {
            return Err(Error::InvalidParameter(format!(
                "cylinder grid needs a < b, n_t ≥ 2, n_angle ≥ 1 (got [{a}, {b}], {n_t}, {n_angle})"
            )));
        }
        let h = (b - a) / (n_t + 1) as f64;
        let profile: Vec<f64> = (0..n_t + 2).map(|i| f(a + i as f64 * h)).collect();
        Self::from_samples(a, b, n_angle, profile)
    }

    /// `profile` holds `f` at all `n_t + 2` nodes, endpoints included.
    pub fn from_samples(a: f64, b: f64, n_angle: usize, profile: Vec<f64>) -> Result<Self> {
        if profile.len() < 4 {
            return Err(Error::InvalidParameter("cylinder profile needs at least 4 samples".into()));
        }
        if let Some((i, v)) = profile.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::InvalidParameter(format!("profile must be positive (f[{i}] = {v})")));
        }
        let n_t = profile.len() - 2;
        let h = (b - a) / (n_t + 1) as f64;
        let dth = 2.0 * PI / n_angle as f64;
        let weights =
            profile[1..=n_t].iter().flat_map(|&f| std::iter::repeat_n(f * h * dth, n_angle)).collect();
        Ok(Self { a, b, n_t, n_angle, profile, weights })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_angle(&self) -> usize {
        self.n_angle
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n_t + 1) as f64
    }

    /// Node `i ∈ 0 ..= n_t + 1` (0 and `n_t + 1` are the boundary).
    pub fn t(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h()
    }

    /// Profile at node `i ∈ 0 ..= n_t + 1`.
    pub fn profile(&self, i: usize) -> f64 {
        self.profile[i]
    }

    /// Profile at the midpoint between nodes `i` and `i + 1`.
    pub fn profile_mid(&self, i: usize) -> f64 {
        0.5 * (self.profile[i] + self.profile[i + 1])
    }

    /// Interior node whose profile value is smallest.
    pub fn argmin_profile(&self) -> usize {
        (1..=self.n_t).min_by(|&i, &j| self.profile[i].total_cmp(&self.profile[j])).unwrap()
    }

    /// Location of the profile minimum, refined by a parabola through the
    /// smallest sample and its neighbours.
    pub fn profile_minimum(&self) -> f64 {
        let i = self.argmin_profile();
        let (fm, f0, fp) = (self.profile[i - 1], self.profile[i], self.profile[i + 1]);
        let denom = fm - 2.0 * f0 + fp;
        let shift = if denom > 0.0 { 0.5 * (fm - fp) / denom } else { 0.0 };
        self.t(i) + shift.clamp(-1.0, 1.0) * self.h()
    }

    /// Samples `g(t, θ)` at interior nodes × angles, stored `i·n_angle + j`.
    pub fn sample(self: &Arc<Self>, g: impl Fn(f64, f64) -> C64) -> GridField<Self> {
        let dth = 2.0 * PI / self.n_angle as f64;
        let values = (1..=self.n_t)
            .flat_map(|i| (0..self.n_angle).map(move |j| (i, j)))
            .map(|(i, j)| g(self.t(i), j as f64 * dth))
            .collect();
        GridField { grid: self.clone(), values }
    }
}
