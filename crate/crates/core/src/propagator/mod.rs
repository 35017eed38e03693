//! Unitary evolution `e^{−itH}` and the diagnostics built on it.
//!
//! Sphere and surface-of-revolution Hamiltonians are block-diagonal over the
//! azimuthal order once the potential is axisymmetric; each block is a small
//! dense Hermitian matrix ([`HamiltonianBlock`]) evolved by eigendecomposition
//! or Lanczos. The periodic box uses Strang splitting with FFTs.

mod dense;
mod diagnostics;
mod hamiltonian;
mod krylov;
mod splitstep;

pub use dense::{evolve_dense, DenseExponential, DENSE_CAP};
pub use diagnostics::{
    duhamel_diagnostics, linfty_stability_check, multiplication_phase, phase_laplacian_norms,
    propagator_distance_probe, simpson, DuhamelDiagnostics,
};
pub use hamiltonian::{
    assemble_cylinder_block, assemble_sphere_block, assemble_zonal_block, free_sphere_block,
    sphere_potential_matrix, Geometry, HamiltonianBlock, HERMITIAN_TOL,
};
pub use krylov::{evolve_krylov, KrylovOptions};
pub use splitstep::{default_steps, evolve_splitstep, BOUNDARY_MASS_TOL};

/// Unitarity budget every evolution is held to.
pub const UNITARITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Dense,
    Krylov,
    SplitStep,
    Phase,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Dense => "dense-exp",
            Method::Krylov => "krylov",
            Method::SplitStep => "splitstep",
            Method::Phase => "phase",
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolutionResult<S> {
    pub state: S,
    pub time: f64,
    pub method: Method,
    pub steps: usize,
    /// largest Krylov dimension used (Krylov only)
    pub krylov_dim: Option<usize>,
    /// `|‖u(t)‖ − ‖u(0)‖|`
    pub unitarity_defect: f64,
    /// mass in the box guard band at the final time (box only)
    pub boundary_mass: Option<f64>,
}

impl<S> EvolutionResult<S> {
    /// False when the box guard band picked up more than [`BOUNDARY_MASS_TOL`].
    pub fn is_valid(&self) -> bool {
        self.boundary_mass.is_none_or(|m| m <= BOUNDARY_MASS_TOL)
    }
}

pub(crate) fn l2_norm(v: &[crate::C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
pub(crate) mod testutil {
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::{l2_norm, Geometry, HamiltonianBlock};
    use crate::discretization::{ModeBasis, SpectralState};
    use crate::C64;

    pub(crate) fn random_hermitian(n: usize, seed: u64) -> HamiltonianBlock {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        HamiltonianBlock::new(Geometry::Box, 0, ModeBasis::Generic { dim: n }, m, 0.0).unwrap()
    }

    pub(crate) fn random_state(n: usize, seed: u64) -> SpectralState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let norm = l2_norm(&v);
        v.iter_mut().for_each(|z| *z /= norm);
        SpectralState::new(ModeBasis::Generic { dim: n }, v).unwrap()
    }
}
