use nalgebra::{DMatrix, SymmetricEigen};

use super::{l2_norm, EvolutionResult, Method};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrylovOptions {
    /// target absolute error over the whole interval
    pub tol: f64,
    /// Lanczos dimension per substep
    pub max_dim: usize,
    /// restarts (substeps) before giving up
    pub max_substeps: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_dim: 40, max_substeps: 100_000 }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `exp(−iτT) e₁` for the real symmetric tridiagonal `T`.
fn small_exp(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<C64> {
    let m = alpha.len();
    let t = DMatrix::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| {
                    let s = eig.eigenvectors[(i, k)] * eig.eigenvectors[(0, k)];
                    C64::from_polar(s, -tau * eig.eigenvalues[k])
                })
                .sum()
        })
        .collect()
}

/// `e^{−itH} u0` by restarted Lanczos with full reorthogonalization.
///
/// `apply(x, out)` must compute `out = Hx` for a Hermitian `H`. Each substep
/// builds a Krylov basis from the current state, then accepts the largest
/// step `τ` whose a-posteriori error `β_m |[e^{−iτT}e₁]_m|·‖u‖` stays below
/// its share `tol·τ/|t|` of the budget. An invariant subspace (zero `β`)
/// makes the step exact.
pub fn evolve_krylov(
    apply: impl Fn(&[C64], &mut [C64]),
    u0: &[C64],
    t: f64,
    opts: KrylovOptions,
) -> Result<EvolutionResult<Vec<C64>>> {
    if !(opts.tol >= 1e-12) {
        return Err(Error::InvalidParameter(format!("Krylov tolerance must be ≥ 1e-12, got {}", opts.tol)));
    }
    if opts.max_dim == 0 {
        return Err(Error::InvalidParameter("Krylov dimension must be positive".into()));
    }
    let n = u0.len();
    let norm0 = l2_norm(u0);
    let mut v = u0.to_vec();
    let mut done = 0.0f64;
    let total = t.abs();
    let sign = t.signum();
    let mut steps = 0;
    let mut max_dim_used = 0;
    let mut tau = total;
    let mut worst = 0.0f64;
    while done < total && norm0 > 0.0 {
        if steps >= opts.max_substeps {
            return Err(Error::KrylovNonConvergence { steps, residual: worst });
        }
        let beta0 = l2_norm(&v);
        let mut basis: Vec<Vec<C64>> = vec![v.iter().map(|z| z / beta0).collect()];
        let mut alpha = Vec::new();
        let mut beta = Vec::new();
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut scale = 0.0f64;
        let mut breakdown = false;
        for j in 0..opts.max_dim.min(n) {
            apply(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            for (wi, qi) in w.iter_mut().zip(&basis[j]) {
                *wi -= a * qi;
            }
            if j > 0 {
                let b = beta[j - 1];
                for (wi, qi) in w.iter_mut().zip(&basis[j - 1]) {
                    *wi -= b * qi;
                }
            }
            // two passes of classical Gram–Schmidt against the whole basis
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    for (wi, qi) in w.iter_mut().zip(q) {
                        *wi -= c * qi;
                    }
                }
            }
            let b = l2_norm(&w);
            scale = scale.max((a * a + b * b).sqrt());
            beta.push(b);
            if b <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
                breakdown = true;
                break;
            }
            if j + 1 < opts.max_dim.min(n) {
                basis.push(w.iter().map(|z| z / b).collect());
            }
        }
        let m = alpha.len();
        max_dim_used = max_dim_used.max(m);
        let beta_m = *beta.last().unwrap();
        let last_beta = beta.len().min(m.saturating_sub(1));
        let remaining = total - done;
        tau = tau.min(remaining);
        let y = loop {
            let y = small_exp(&alpha, &beta[..last_beta], sign * tau);
            // error estimate; exact on an invariant subspace or when the basis spans the space
            let err = if breakdown || m == n { 0.0 } else { beta_m * y[m - 1].norm() * beta0 };
            if err <= opts.tol * tau / total {
                worst = worst.max(err);
                break y;
            }
            worst = worst.max(err);
            tau *= 0.5;
            if tau < total * 1e-12 {
                return Err(Error::KrylovNonConvergence { steps, residual: err });
            }
        };
        v.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (q, c) in basis.iter().zip(&y) {
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi += beta0 * c * qi;
            }
        }
        done += tau;
        if remaining - tau <= total * 1e-15 {
            done = total;
        }
        steps += 1;
        tau *= 2.0;
    }
    let defect = (l2_norm(&v) - norm0).abs();
    Ok(EvolutionResult {
        state: v,
        time: t,
        method: Method::Krylov,
        steps,
        krylov_dim: Some(max_dim_used),
        unitarity_defect: defect,
        boundary_mass: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::testutil::{random_hermitian, random_state};
    use crate::propagator::DenseExponential;

    #[test]
    fn matches_dense_on_random_blocks() {
        for seed in 0..3 {
            let h = random_hermitian(200, 10 + seed);
            let u = random_state(200, 20 + seed);
            let dense = DenseExponential::new(&h).unwrap().evolve(&u, 1.0).unwrap();
            let kry = evolve_krylov(|x, o| h.apply(x, o), u.coeffs(), 1.0, KrylovOptions::default()).unwrap();
            let diff: f64 =
                dense.state.coeffs().iter().zip(&kry.state).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            assert!(diff < 1e-9, "seed {seed}: {diff:e}");
            assert!(kry.unitarity_defect < 1e-11);
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let h = random_hermitian(20, 3);
        let u = random_state(20, 4);
        let r = evolve_krylov(|x, o| h.apply(x, o), u.coeffs(), 0.0, KrylovOptions::default()).unwrap();
        assert_eq!(r.state, u.coeffs());
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn eigenvector_collapses_to_one_dimension() {
        let h = random_hermitian(50, 5);
        let e = DenseExponential::new(&h).unwrap();
        let eig = nalgebra::SymmetricEigen::new(h.matrix().clone());
        let v: Vec<C64> = eig.eigenvectors.column(7).iter().copied().collect();
        let lam = eig.eigenvalues[7];
        let r = evolve_krylov(|x, o| h.apply(x, o), &v, 2.0, KrylovOptions::default()).unwrap();
        assert_eq!(r.krylov_dim, Some(1));
        let phase = C64::from_polar(1.0, -2.0 * lam);
        let diff: f64 = v.iter().zip(&r.state).map(|(a, b)| (a * phase - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(diff < 1e-10, "{diff:e}");
        assert!(!e.eigenvalues().is_empty());
    }

    #[test]
    fn rejects_tiny_tolerance_and_reports_nonconvergence() {
        let h = random_hermitian(30, 6);
        let u = random_state(30, 7);
        let bad = KrylovOptions { tol: 1e-14, ..Default::default() };
        assert!(matches!(evolve_krylov(|x, o| h.apply(x, o), u.coeffs(), 1.0, bad), Err(Error::InvalidParameter(_))));
        let starved = KrylovOptions { tol: 1e-12, max_dim: 2, max_substeps: 3 };
        let r = evolve_krylov(|x, o| h.apply(x, o), u.coeffs(), 50.0, starved);
        assert!(matches!(r, Err(Error::KrylovNonConvergence { .. })));
    }
}
