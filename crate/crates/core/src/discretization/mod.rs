//! Grids, quadrature rules, mode bases and transforms.
//!
//! Every grid implements [`Quadrature`]: a list of nodes with positive weights
//! such that `Σ wᵢ f(xᵢ) ≈ ∫ f dμ` in the grid's natural measure. Fields are
//! samples tied to a shared grid through [`GridField`].

mod boxgrid;
mod cylinder;
mod gauss;
pub mod legendre;
mod sphere;
mod zonal;

use std::sync::Arc;

pub use boxgrid::BoxGrid;
pub use cylinder::CylinderGrid;
pub use gauss::gauss_legendre;
pub use sphere::SphereGrid;
pub use zonal::ZonalGrid;

use crate::{Error, Result, C64};

/// A discrete measure: nodes carry positive weights approximating `dμ`.
pub trait Quadrature {
    fn weights(&self) -> &[f64];

    fn len(&self) -> usize {
        self.weights().len()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Complex samples of a function on a quadrature grid.
#[derive(Clone, Debug)]
pub struct GridField<G> {
    grid: Arc<G>,
    values: Vec<C64>,
}

impl<G: Quadrature> GridField<G> {
    pub fn new(grid: Arc<G>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Length { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<G>) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.len()];
        Self { grid, values }
    }

    pub fn from_real(grid: Arc<G>, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| C64::new(v, 0.0)).collect())
    }

    pub fn grid(&self) -> &Arc<G> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// `Σ wᵢ fᵢ`; the pairing every measure diagnostic reduces to.
    pub fn integrate(&self) -> C64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .fold(C64::new(0.0, 0.0), |acc, (w, v)| acc + v * *w)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_grid(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .fold(C64::new(0.0, 0.0), |acc, (w, (a, b))| acc + a.conj() * b * *w))
    }

    /// `‖self − other‖` in the grid's L² norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// Pointwise product, same grid required.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { grid: self.grid.clone(), values })
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&mut self, s: C64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.weights() == other.grid.weights() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Index of one basis mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeIndex {
    Sphere { l: usize, m: i64 },
    Box { k: [i64; 3] },
    Cylinder { m: i64, j: usize },
}

/// Layout of a coefficient vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeBasis {
    /// All `Y_{l,m}` with `l ≤ l_max`, packed at `l² + l + m`.
    Sphere { l_max: usize },
    /// One azimuthal block: `Y_{l,m}` for `l = |m| ..= l_max`.
    SphereBlock { m: i64, l_max: usize },
    /// Fourier modes of an `n³` box, row-major over the three FFT indices.
    Box { n: usize },
    /// Radial Sturm–Liouville modes `j = 0..count` of angular order `m`.
    Cylinder { m: i64, count: usize },
    /// Plain coordinates, no geometric meaning.
    Generic { dim: usize },
}

impl ModeBasis {
    pub fn len(&self) -> usize {
        match *self {
            ModeBasis::Sphere { l_max } => (l_max + 1) * (l_max + 1),
            ModeBasis::SphereBlock { m, l_max } => (l_max + 1).saturating_sub(m.unsigned_abs() as usize),
            ModeBasis::Box { n } => n * n * n,
            ModeBasis::Cylinder { count, .. } => count,
            ModeBasis::Generic { dim } => dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn position(&self, index: ModeIndex) -> Option<usize> {
        match (*self, index) {
            (ModeBasis::Sphere { l_max }, ModeIndex::Sphere { l, m }) => {
                (l <= l_max && m.unsigned_abs() as usize <= l).then(|| (l * l + l) as i64 + m).map(|p| p as usize)
            }
            (ModeBasis::SphereBlock { m: mb, l_max }, ModeIndex::Sphere { l, m }) => {
                let lo = mb.unsigned_abs() as usize;
                (m == mb && l >= lo && l <= l_max).then(|| l - lo)
            }
            (ModeBasis::Box { n }, ModeIndex::Box { k }) => {
                let half = (n / 2) as i64;
                if k.iter().any(|&c| c < -half || c >= half) {
                    return None;
                }
                let idx = |c: i64| (if c < 0 { c + n as i64 } else { c }) as usize;
                Some((idx(k[0]) * n + idx(k[1])) * n + idx(k[2]))
            }
            (ModeBasis::Cylinder { m: mb, count }, ModeIndex::Cylinder { m, j }) => (m == mb && j < count).then_some(j),
            _ => None,
        }
    }

    pub fn mode(&self, pos: usize) -> Option<ModeIndex> {
        if pos >= self.len() {
            return None;
        }
        match *self {
            ModeBasis::Sphere { .. } => {
                let l = (pos as f64).sqrt() as usize;
                // guard the float sqrt at perfect squares
                let l = if (l + 1) * (l + 1) <= pos { l + 1 } else if l * l > pos { l - 1 } else { l };
                Some(ModeIndex::Sphere { l, m: pos as i64 - (l * l + l) as i64 })
            }
            ModeBasis::SphereBlock { m, .. } => Some(ModeIndex::Sphere { l: m.unsigned_abs() as usize + pos, m }),
            ModeBasis::Box { n } => {
                let signed = |i: usize| if i >= n / 2 { i as i64 - n as i64 } else { i as i64 };
                Some(ModeIndex::Box { k: [signed(pos / (n * n)), signed((pos / n) % n), signed(pos % n)] })
            }
            ModeBasis::Cylinder { m, .. } => Some(ModeIndex::Cylinder { m, j: pos }),
            ModeBasis::Generic { .. } => None,
        }
    }
}

/// Coefficient vector over a mode basis; the unit of propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralState {
    basis: ModeBasis,
    coeffs: Vec<C64>,
}

impl SpectralState {
    pub fn new(basis: ModeBasis, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::Length { expected: basis.len(), got: coeffs.len() });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zeros(basis: ModeBasis) -> Self {
        Self { basis, coeffs: vec![C64::new(0.0, 0.0); basis.len()] }
    }

    /// Unit vector on a single mode.
    pub fn unit(basis: ModeBasis, index: ModeIndex) -> Result<Self> {
        let pos = basis
            .position(index)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {index:?} not in basis {basis:?}")))?;
        let mut s = Self::zeros(basis);
        s.coeffs[pos] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    pub fn get(&self, index: ModeIndex) -> Option<C64> {
        self.basis.position(index).map(|p| self.coeffs[p])
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_packing_round_trips() {
        let basis = ModeBasis::Sphere { l_max: 12 };
        for pos in 0..basis.len() {
            let idx = basis.mode(pos).unwrap();
            assert_eq!(basis.position(idx), Some(pos));
            if let ModeIndex::Sphere { l, m } = idx {
                assert!(m.unsigned_abs() as usize <= l && l <= 12);
            }
        }
        assert_eq!(basis.position(ModeIndex::Sphere { l: 13, m: 0 }), None);
        assert_eq!(basis.position(ModeIndex::Sphere { l: 2, m: 3 }), None);
    }

    #[test]
    fn box_packing_uses_signed_frequencies() {
        let basis = ModeBasis::Box { n: 8 };
        for pos in [0, 5, 77, 511] {
            let idx = basis.mode(pos).unwrap();
            assert_eq!(basis.position(idx), Some(pos));
        }
        assert_eq!(basis.position(ModeIndex::Box { k: [4, 0, 0] }), None);
        assert_eq!(basis.position(ModeIndex::Box { k: [-4, 3, -1] }), Some((4 * 8 + 3) * 8 + 7));
    }

    #[test]
    fn block_basis() {
        let basis = ModeBasis::SphereBlock { m: -3, l_max: 10 };
        assert_eq!(basis.len(), 8);
        assert_eq!(basis.position(ModeIndex::Sphere { l: 3, m: -3 }), Some(0));
        assert_eq!(basis.position(ModeIndex::Sphere { l: 4, m: 3 }), None);
    }
}
