use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::discretization::legendre::column_into;
use crate::discretization::{CylinderGrid, GridField, ModeBasis, Quadrature, SphereGrid, ZonalGrid};
use crate::quasimodes::sturm::assemble;
use crate::{Error, Result, C64};

/// Relative Hermitian-symmetry tolerance for assembled blocks.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Sphere,
    Box,
    Cylinder,
}

/// One invariant block of a Hamiltonian, stored densely.
///
/// The diagonal may carry a constant `shift` removed from the kinetic part;
/// evolving with the block then drops the global phase `e^{−it·shift}`, which
/// is common to every block sharing the shift and cancels in all distances.
#[derive(Clone, Debug)]
pub struct HamiltonianBlock {
    pub geometry: Geometry,
    /// sphere: azimuthal order; cylinder: angular mode; box: 0
    pub label: i64,
    basis: ModeBasis,
    matrix: DMatrix<C64>,
    shift: f64,
}

impl HamiltonianBlock {
    /// Wrap a matrix after checking it is Hermitian; the stored copy is
    /// exactly symmetrized.
    pub fn new(geometry: Geometry, label: i64, basis: ModeBasis, matrix: DMatrix<C64>, shift: f64) -> Result<Self> {
        let n = basis.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Length { expected: n, got: matrix.nrows() });
        }
        let matrix = symmetrized(matrix)?;
        Ok(Self { geometry, label, basis, matrix, shift })
    }

    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn basis(&self) -> ModeBasis {
        self.basis
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Largest absolute entry.
    pub fn max_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// The block plus a Hermitian coupling matrix of the same size.
    pub fn with_added(&self, extra: &DMatrix<C64>) -> Result<Self> {
        if extra.shape() != self.matrix.shape() {
            return Err(Error::Length { expected: self.size(), got: extra.nrows() });
        }
        Self::new(self.geometry, self.label, self.basis, &self.matrix + extra, self.shift)
    }

    /// The block plus a scalar multiple of the identity.
    pub fn with_constant(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.size() {
            out.matrix[(i, i)] += c;
        }
        out
    }

    /// For a sphere block, add the coupling of an axisymmetric potential.
    pub fn with_zonal_potential(&self, w: &GridField<ZonalGrid>) -> Result<Self> {
        let ModeBasis::SphereBlock { m, l_max } = self.basis else {
            return Err(Error::InvalidParameter("zonal potentials couple sphere blocks only".into()));
        };
        self.with_added(&sphere_potential_matrix(w, m.unsigned_abs() as usize, l_max))
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[C64], out: &mut [C64]) {
        let n = self.size();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                acc += self.matrix[(i, j)] * xj;
            }
            *o = acc;
        }
    }
}

fn symmetrized(matrix: DMatrix<C64>) -> Result<DMatrix<C64>> {
    let scale = matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let adj = matrix.adjoint();
    let defect = (&matrix - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(defect / scale.max(f64::MIN_POSITIVE)));
    }
    Ok((matrix + adj).scale(0.5))
}

/// `V_{ll'} = ∫ V P̄_l^m P̄_{l'}^m sinθ dθ` for `l, l' = m ..= l_max`, by the
/// zonal rule carrying `V` (its weights include `2π sinθ`).
pub fn sphere_potential_matrix(v: &GridField<ZonalGrid>, m: usize, l_max: usize) -> DMatrix<C64> {
    let size = l_max + 1 - m;
    let mut acc = DMatrix::<f64>::zeros(size, size);
    let mut col = vec![0.0; size];
    let mut imag = DMatrix::<f64>::zeros(size, size);
    let grid = v.grid();
    for ((theta, w), val) in grid.thetas().iter().zip(grid.weights()).zip(v.values()) {
        if *val == C64::new(0.0, 0.0) {
            continue;
        }
        column_into(m, l_max, *theta, &mut col);
        if col.iter().all(|c| *c == 0.0) {
            continue;
        }
        let s = w / (2.0 * PI);
        for i in 0..size {
            let ci = s * col[i];
            for j in i..size {
                acc[(i, j)] += ci * col[j] * val.re;
                if val.im != 0.0 {
                    imag[(i, j)] += ci * col[j] * val.im;
                }
            }
        }
    }
    DMatrix::from_fn(size, size, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        C64::new(acc[(a, b)], imag[(a, b)])
    })
}

/// Kinetic diagonal `(l(l+1) − shift)` computed in exact integer arithmetic.
fn kinetic(l: usize, shift: u64) -> f64 {
    (l as i128 * (l as i128 + 1) - shift as i128) as f64
}

/// Azimuthal block of `−Δ + V` for an axisymmetric `V` given on a zonal rule.
///
/// `shift` is subtracted from every kinetic entry (use `n(n+1)` to centre
/// the block on the degree-`n` eigenvalue).
pub fn assemble_zonal_block(v: &GridField<ZonalGrid>, m: usize, l_max: usize, shift: u64) -> Result<HamiltonianBlock> {
    if l_max < m {
        return Err(Error::InvalidParameter(format!("L_max = {l_max} below the block order m = {m}")));
    }
    let mut matrix = sphere_potential_matrix(v, m, l_max);
    for (i, l) in (m..=l_max).enumerate() {
        matrix[(i, i)] += kinetic(l, shift);
    }
    HamiltonianBlock::new(
        Geometry::Sphere,
        m as i64,
        ModeBasis::SphereBlock { m: m as i64, l_max },
        matrix,
        shift as f64,
    )
}

/// Azimuthal block of `−Δ + V` for `V` sampled on a full sphere grid.
///
/// `V` must not depend on longitude (spread ≤ 1e-12 per ring).
pub fn assemble_sphere_block(v: &GridField<SphereGrid>, m: usize, l_max: usize) -> Result<HamiltonianBlock> {
    let profile = v.grid().zonal_profile(v)?;
    assemble_zonal_block(&profile, m, l_max, 0)
}

/// Kinetic-only sphere block.
pub fn free_sphere_block(m: usize, l_max: usize, shift: u64) -> Result<HamiltonianBlock> {
    let zonal = Arc::new(ZonalGrid::gauss(1));
    assemble_zonal_block(&GridField::zeros(zonal), m, l_max, shift)
}

/// Angular-mode-`m` block of `−∂_t² − (f′/f)∂_t + m²/f² + V(t)` on a surface
/// of revolution, in the unitary coordinates `wᵢ = √(h fᵢ) vᵢ` at the
/// interior nodes. `v` holds `V` at those nodes.
pub fn assemble_cylinder_block(grid: &Arc<CylinderGrid>, m: i64, v: &[f64]) -> Result<HamiltonianBlock> {
    let n = grid.n_t();
    if v.len() != n {
        return Err(Error::Length { expected: n, got: v.len() });
    }
    let p = assemble(grid, m);
    let sb: Vec<f64> = p.b.iter().map(|b| b.sqrt()).collect();
    let mut matrix = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        matrix[(i, i)] = C64::new(p.a_diag[i] / p.b[i] + v[i], 0.0);
        if i + 1 < n {
            let e = C64::new(p.a_off[i] / (sb[i] * sb[i + 1]), 0.0);
            matrix[(i, i + 1)] = e;
            matrix[(i + 1, i)] = e;
        }
    }
    HamiltonianBlock::new(Geometry::Cylinder, m, ModeBasis::Generic { dim: n }, matrix, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::EquatorialCutoff;
    use crate::quasimodes::{measure_pairing, make_equatorial};

    #[test]
    fn zero_and_constant_potentials() {
        let grid = Arc::new(SphereGrid::for_degree(12).unwrap());
        let zero = assemble_sphere_block(&GridField::zeros(grid.clone()), 3, 12).unwrap();
        for i in 0..zero.size() {
            for j in 0..zero.size() {
                let l = (3 + i) as f64;
                let expected = if i == j { l * (l + 1.0) } else { 0.0 };
                assert_eq!(zero.matrix()[(i, j)], C64::new(expected, 0.0));
            }
        }
        let c = grid.sample_real(|_, _| 0.7);
        let block = assemble_sphere_block(&c, 3, 12).unwrap();
        let diff = block.matrix() - zero.with_constant(0.7).matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn rejects_longitude_dependence_and_bad_range() {
        let grid = Arc::new(SphereGrid::for_degree(8).unwrap());
        let v = grid.sample_real(|t, p| t.cos() * p.cos());
        assert!(matches!(assemble_sphere_block(&v, 1, 8), Err(Error::NotAxisymmetric(_))));
        let z = GridField::zeros(grid);
        assert!(assemble_sphere_block(&z, 5, 4).is_err());
    }

    #[test]
    fn cutoff_diagonal_matches_pairing() {
        let n = 10;
        let grid = Arc::new(SphereGrid::new(200, 2 * (n + 8) + 1).unwrap());
        let cut = EquatorialCutoff::new(1, 0.5, 0.01).unwrap();
        let v = cut.sample_sphere(&grid);
        let block = assemble_sphere_block(&v, n, n + 8).unwrap();
        let (_, u) = make_equatorial(n, &grid).unwrap();
        let pairing = measure_pairing(&cut.sample_sphere(&grid), &u).unwrap();
        let e = block.matrix()[(0, 0)].re - (n * (n + 1)) as f64;
        assert!((e - pairing).abs() < 1e-12, "{e} vs {pairing}");
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = DMatrix::<C64>::identity(3, 3);
        m[(0, 1)] = C64::new(0.0, 1.0);
        let r = HamiltonianBlock::new(Geometry::Box, 0, ModeBasis::Generic { dim: 3 }, m, 0.0);
        assert!(matches!(r, Err(Error::NotHermitian(_))));
    }

    #[test]
    fn shifted_kinetic_is_exact_at_huge_degree() {
        let n = 10_000_000usize;
        let b = free_sphere_block(n, n + 3, (n * (n + 1)) as u64).unwrap();
        for i in 0..4 {
            let expected = (i * (2 * n + i + 1)) as f64;
            assert_eq!(b.matrix()[(i, i)].re, expected);
        }
    }

    #[test]
    fn cylinder_block_spectrum_matches_sturm_solver() {
        use crate::quasimodes::solve_sturm_liouville;
        let grid = Arc::new(CylinderGrid::new(-1.0, 1.0, 127, 1, f64::cosh).unwrap());
        let block = assemble_cylinder_block(&grid, 3, &vec![0.0; 127]).unwrap();
        let eig = nalgebra::SymmetricEigen::new(block.matrix().clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let modes = solve_sturm_liouville(&grid, 3, 3).unwrap();
        for (e, m) in ev.iter().zip(&modes) {
            assert!((e - m.eigenvalue).abs() < 1e-9 * m.eigenvalue, "{e} vs {}", m.eigenvalue);
        }
    }
}
