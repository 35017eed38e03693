use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{l2_norm, EvolutionResult, HamiltonianBlock, Method};
use crate::discretization::SpectralState;
use crate::{Error, Result, C64};

/// Largest block handled by dense diagonalization.
pub const DENSE_CAP: usize = 4096;

/// A diagonalized block, reusable across many times and initial states.
#[derive(Clone, Debug)]
pub struct DenseExponential {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl DenseExponential {
    pub fn new(h: &HamiltonianBlock) -> Result<Self> {
        if h.size() > DENSE_CAP {
            return Err(Error::BlockTooLarge { size: h.size(), cap: DENSE_CAP });
        }
        let eig = SymmetricEigen::try_new(h.matrix().clone(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigen("Hermitian eigendecomposition did not converge".into()))?;
        Ok(Self { eigenvalues: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `e^{−itH} u0` on raw coefficients.
    pub fn apply(&self, u0: &[C64], t: f64) -> Vec<C64> {
        let x = DVector::from_column_slice(u0);
        let mut y = self.vectors.adjoint() * x;
        for (c, lam) in y.iter_mut().zip(&self.eigenvalues) {
            *c *= C64::from_polar(1.0, -lam * t);
        }
        (&self.vectors * y).iter().copied().collect()
    }

    pub fn evolve(&self, u0: &SpectralState, t: f64) -> Result<EvolutionResult<SpectralState>> {
        if u0.coeffs().len() != self.eigenvalues.len() {
            return Err(Error::Length { expected: self.eigenvalues.len(), got: u0.coeffs().len() });
        }
        let out = if t == 0.0 { u0.coeffs().to_vec() } else { self.apply(u0.coeffs(), t) };
        let defect = (l2_norm(&out) - u0.norm()).abs();
        Ok(EvolutionResult {
            state: SpectralState::new(u0.basis(), out)?,
            time: t,
            method: Method::Dense,
            steps: 1,
            krylov_dim: None,
            unitarity_defect: defect,
            boundary_mass: None,
        })
    }
}

/// `e^{−itH} u0` by unitary eigendecomposition of the block.
pub fn evolve_dense(h: &HamiltonianBlock, u0: &SpectralState, t: f64) -> Result<EvolutionResult<SpectralState>> {
    if u0.basis() != h.basis() {
        return Err(Error::InvalidParameter("state basis differs from the block basis".into()));
    }
    DenseExponential::new(h)?.evolve(u0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::{ModeBasis, ModeIndex};
    use crate::propagator::testutil::{random_hermitian, random_state};
    use crate::propagator::{free_sphere_block, Geometry};

    #[test]
    fn zero_time_and_eigenphase() {
        let h = free_sphere_block(2, 10, 0).unwrap();
        let basis = h.basis();
        let u = SpectralState::unit(basis, ModeIndex::Sphere { l: 5, m: 2 }).unwrap();
        let r0 = evolve_dense(&h, &u, 0.0).unwrap();
        assert_eq!(r0.state, u);
        let t = 0.37;
        let r = evolve_dense(&h, &u, t).unwrap();
        let expected = C64::from_polar(1.0, -30.0 * t);
        let got = r.state.get(ModeIndex::Sphere { l: 5, m: 2 }).unwrap();
        assert!((got - expected).norm() < 1e-13);
        assert!(r.unitarity_defect < 1e-12);
    }

    #[test]
    fn group_law_and_time_reversal() {
        let h = random_hermitian(60, 1);
        let u = random_state(60, 2);
        let e = DenseExponential::new(&h).unwrap();
        let a = e.evolve(&e.evolve(&u, 0.4).unwrap().state, 0.9).unwrap().state;
        let b = e.evolve(&u, 1.3).unwrap().state;
        let back = e.evolve(&b, -1.3).unwrap().state;
        let d = |x: &SpectralState, y: &SpectralState| {
            x.coeffs().iter().zip(y.coeffs()).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt()
        };
        assert!(d(&a, &b) < 1e-12);
        assert!(d(&back, &u) < 1e-12);
    }

    #[test]
    fn size_cap() {
        let h = HamiltonianBlock::new(
            Geometry::Box,
            0,
            ModeBasis::Generic { dim: DENSE_CAP + 1 },
            DMatrix::identity(DENSE_CAP + 1, DENSE_CAP + 1),
            0.0,
        )
        .unwrap();
        assert!(matches!(DenseExponential::new(&h), Err(Error::BlockTooLarge { .. })));
    }
}
