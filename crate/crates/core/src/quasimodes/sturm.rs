//! Radial modes on a surface of revolution.
//!
//! Separating `u = v(t) e^{imθ}/√(2π)` turns `−Δu = λu` into the weighted
//! problem `−(f v′)′ + (m²/f) v = λ f v`, `v(a) = v(b) = 0`. Central
//! differences with `f` averaged at half nodes give the symmetric pencil
//! `A v = λ B v`, `B = diag(f)`; the lowest eigenpairs of
//! `B^{-1/2} A B^{-1/2}` come from Sturm-sequence bisection followed by
//! inverse iteration.

use std::sync::Arc;

use crate::discretization::CylinderGrid;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SturmLiouvilleMode {
    pub m: i64,
    pub j: usize,
    pub eigenvalue: f64,
    /// `v` at the interior nodes, `Σ h fᵢ vᵢ² = 1`
    pub values: Vec<f64>,
    pub grid: Arc<CylinderGrid>,
}

impl SturmLiouvilleMode {
    /// `v` at every node including the Dirichlet ends.
    pub fn with_boundary(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len() + 2);
        out.push(0.0);
        out.extend_from_slice(&self.values);
        out.push(0.0);
        out
    }

    /// `∫ |v|² f dt` on the discrete weight.
    pub fn weighted_norm_sqr(&self) -> f64 {
        let h = self.grid.h();
        self.values.iter().enumerate().map(|(i, v)| h * self.grid.profile(i + 1) * v * v).sum()
    }
}

pub(crate) struct Pencil {
    /// diagonal of A
    pub(crate) a_diag: Vec<f64>,
    /// A_{i,i+1}
    pub(crate) a_off: Vec<f64>,
    /// B = diag(f)
    pub(crate) b: Vec<f64>,
}

pub(crate) fn assemble(grid: &CylinderGrid, m: i64) -> Pencil {
    let n = grid.n_t();
    let h2 = grid.h().powi(2);
    let m2 = (m * m) as f64;
    let a_diag = (1..=n)
        .map(|i| (grid.profile_mid(i - 1) + grid.profile_mid(i)) / h2 + m2 / grid.profile(i))
        .collect();
    let a_off = (1..n).map(|i| -grid.profile_mid(i) / h2).collect();
    let b = (1..=n).map(|i| grid.profile(i)).collect();
    Pencil { a_diag, a_off, b }
}

/// Symmetric tridiagonal matrix `C` with diagonal `d` and off-diagonal `e`.
struct Tridiagonal {
    d: Vec<f64>,
    e: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.d.len() {
            let e2 = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] };
            q = self.d[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    fn rayleigh(&self, w: &[f64]) -> f64 {
        let n = self.d.len();
        let mut acc = 0.0;
        for i in 0..n {
            let mut cw = self.d[i] * w[i];
            if i > 0 {
                cw += self.e[i - 1] * w[i - 1];
            }
            if i + 1 < n {
                cw += self.e[i] * w[i + 1];
            }
            acc += w[i] * cw;
        }
        acc / dot(w, w)
    }

    /// k-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(C − σ I) y = rhs` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        // rows hold up to three nonzeros after pivoting: (diag, super, super2)
        let mut diag: Vec<f64> = self.d.iter().map(|d| d - sigma).collect();
        let mut sup: Vec<f64> = self.e.clone();
        sup.push(0.0);
        let mut sup2 = vec![0.0; n];
        let mut sub: Vec<f64> = self.e.clone();
        let mut b = rhs.to_vec();
        let tiny = f64::EPSILON * self.d.iter().map(|d| d.abs()).fold(1.0, f64::max);
        for i in 0..n - 1 {
            if sub[i].abs() > diag[i].abs() {
                // swap rows i and i+1
                let (d0, s0, t0) = (diag[i], sup[i], sup2[i]);
                diag[i] = sub[i];
                sup[i] = diag[i + 1];
                sup2[i] = if i + 1 < n - 1 { sup[i + 1] } else { 0.0 };
                let l = d0 / diag[i];
                diag[i + 1] = s0 - l * sup[i];
                sup[i + 1] = if i + 1 < n - 1 { t0 - l * sup2[i] } else { 0.0 };
                b.swap(i, i + 1);
                b[i + 1] -= l * b[i];
                sub[i] = l;
            } else {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let l = sub[i] / diag[i];
                diag[i + 1] -= l * sup[i];
                b[i + 1] -= l * b[i];
                sub[i] = l;
            }
        }
        if diag[n - 1] == 0.0 {
            diag[n - 1] = tiny;
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= sup[i] * y[i + 1];
            }
            if i + 2 < n {
                acc -= sup2[i] * y[i + 2];
            }
            y[i] = acc / diag[i];
        }
        y
    }
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest `count` weighted-orthonormal eigenpairs of angular order `m`.
pub fn solve_sturm_liouville(grid: &Arc<CylinderGrid>, m: i64, count: usize) -> Result<Vec<SturmLiouvilleMode>> {
    if count == 0 || count > grid.n_t() {
        return Err(Error::InvalidParameter(format!("count must be in 1..={}, got {count}", grid.n_t())));
    }
    let p = assemble(grid, m);
    let n = grid.n_t();
    let sb: Vec<f64> = p.b.iter().map(|b| b.sqrt()).collect();
    let c = Tridiagonal {
        d: p.a_diag.iter().zip(&p.b).map(|(a, b)| a / b).collect(),
        e: p.a_off.iter().enumerate().map(|(i, a)| a / (sb[i] * sb[i + 1])).collect(),
    };
    let h = grid.h();
    let mut found: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut modes = Vec::with_capacity(count);
    for j in 0..count {
        let lambda = c.eigenvalue(j);
        let sigma = lambda + 1e-13 * lambda.abs().max(1.0);
        let mut w: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919 + j * 104729) % 97) as f64 / 97.0).collect();
        normalize(&mut w);
        for _ in 0..4 {
            w = c.solve_shifted(sigma, &w);
            for prev in &found {
                let proj = dot(prev, &w);
                w.iter_mut().zip(prev).for_each(|(x, p)| *x -= proj * p);
            }
            normalize(&mut w);
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigen(format!("inverse iteration diverged for m = {m}, j = {j}")));
        }
        let lambda = c.rayleigh(&w);
        // deterministic sign: largest component positive
        let big = w.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if big < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
        // v = B^{-1/2} w, normalized so Σ h f v² = 1
        let mut v: Vec<f64> = w.iter().zip(&sb).map(|(w, s)| w / s).collect();
        let norm = (h * v.iter().zip(&p.b).map(|(v, b)| b * v * v).sum::<f64>()).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let mode = SturmLiouvilleMode { m, j, eigenvalue: lambda, values: v, grid: grid.clone() };
        let (res, bv) = pencil_residual(&mode);
        // a rounded eigenvector cannot beat ε‖A‖‖v‖, so the acceptance bound
        // is the larger of 1e-10‖Bv‖ and a backward-error allowance
        let backward = 64.0 * f64::EPSILON * c.norm_bound() * bv;
        if !(res <= (1e-10 * bv).max(backward)) {
            return Err(Error::Eigen(format!("eigen-residual {res:.3e} too large for m = {m}, j = {j}")));
        }
        found.push(w);
        modes.push(mode);
    }
    Ok(modes)
}

/// `(‖(A − λB)v‖, ‖Bv‖)` for the discrete pencil.
pub fn pencil_residual(mode: &SturmLiouvilleMode) -> (f64, f64) {
    let p = assemble(&mode.grid, mode.m);
    let v = &mode.values;
    let n = v.len();
    let mut r2 = 0.0;
    let mut b2 = 0.0;
    for i in 0..n {
        let mut av = p.a_diag[i] * v[i];
        if i > 0 {
            av += p.a_off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            av += p.a_off[i] * v[i + 1];
        }
        let bv = p.b[i] * v[i];
        r2 += (av - mode.eigenvalue * bv).powi(2);
        b2 += bv * bv;
    }
    (r2.sqrt(), b2.sqrt())
}

/// `∫ g(t) |v|² f dt` (trapezoid on the interior nodes; the ends vanish).
pub fn radial_pairing(mode: &SturmLiouvilleMode, g: impl Fn(f64) -> f64) -> f64 {
    let grid = &mode.grid;
    let h = grid.h();
    mode.values.iter().enumerate().map(|(i, v)| h * grid.profile(i + 1) * v * v * g(grid.t(i + 1))).sum()
}

/// `∫_{|t − center| ≤ w} |v|² f dt`, integrating the piecewise-linear
/// interpolant of `|v|² f` exactly over the clipped window.
pub fn mass_in_window(mode: &SturmLiouvilleMode, center: f64, half_width: f64) -> f64 {
    let grid = &mode.grid;
    let v = mode.with_boundary();
    let dens: Vec<f64> = v.iter().enumerate().map(|(i, v)| v * v * grid.profile(i)).collect();
    let lo = center - half_width;
    let hi = center + half_width;
    let mut acc = 0.0;
    for i in 0..dens.len() - 1 {
        let (t0, t1) = (grid.t(i), grid.t(i + 1));
        let a = t0.max(lo);
        let b = t1.min(hi);
        if b <= a {
            continue;
        }
        let slope = (dens[i + 1] - dens[i]) / (t1 - t0);
        let at = |t: f64| dens[i] + slope * (t - t0);
        acc += 0.5 * (at(a) + at(b)) * (b - a);
    }
    acc
}

/// Mass within `window` of the profile minimum `t₀`.
pub fn concentration_profile(mode: &SturmLiouvilleMode, window: f64) -> f64 {
    mass_in_window(mode, mode.grid.profile_minimum(), window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn flat(n_t: usize) -> Arc<CylinderGrid> {
        Arc::new(CylinderGrid::new(0.0, PI, n_t, 1, |_| 1.0).unwrap())
    }

    #[test]
    fn constant_profile_spectrum() {
        // coarse enough that ε‖A‖ stays well below the 1e-10 residual bound
        let grid = flat(511);
        let modes = solve_sturm_liouville(&grid, 0, 4).unwrap();
        let h = grid.h();
        for (j, mode) in modes.iter().enumerate() {
            let k = (j + 1) as f64;
            // exact discrete eigenvalue of the 3-point Laplacian
            let discrete = (2.0 * (k * h / 2.0).sin() / h).powi(2);
            assert!((mode.eigenvalue - discrete).abs() < 1e-8 * discrete, "j={j}");
            assert!((mode.eigenvalue - k * k).abs() < h * h * k.powi(4) / 10.0);
            let (r, bv) = pencil_residual(mode);
            assert!(r <= 1e-10 * bv, "residual {r:e}");
            // sine shape, normalized: v = √(2/π) sin((j+1)t)
            let t = grid.t(300);
            let expected = (2.0 / PI).sqrt() * (k * t).sin();
            assert!((mode.values[299].abs() - expected.abs()).abs() < 1e-6);
            assert!((mode.weighted_norm_sqr() - 1.0).abs() < 1e-12);
        }
        let shifted = solve_sturm_liouville(&grid, 2, 3).unwrap();
        for (a, b) in shifted.iter().zip(&modes) {
            assert!((a.eigenvalue - b.eigenvalue - 4.0).abs() < 1e-8);
        }
    }

    #[test]
    fn modes_are_weighted_orthonormal() {
        let grid = Arc::new(CylinderGrid::new(-1.0, 1.0, 400, 1, f64::cosh).unwrap());
        let modes = solve_sturm_liouville(&grid, 5, 4).unwrap();
        let h = grid.h();
        for a in &modes {
            for b in &modes {
                let ip: f64 = a.values.iter().zip(&b.values).enumerate().map(|(i, (x, y))| h * grid.profile(i + 1) * x * y).sum();
                let expected = if a.j == b.j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10, "{} {}: {ip}", a.j, b.j);
            }
            let (r, bv) = pencil_residual(a);
            assert!(r <= 1e-10 * bv);
            let full = a.with_boundary();
            assert_eq!(full[0], 0.0);
            assert_eq!(*full.last().unwrap(), 0.0);
        }
        assert!(modes.windows(2).all(|w| w[0].eigenvalue < w[1].eigenvalue));
    }

    #[test]
    fn window_mass_sine_integral() {
        let grid = flat(1023);
        let ground = &solve_sturm_liouville(&grid, 0, 1).unwrap()[0];
        assert!((concentration_profile(ground, PI) - 1.0).abs() < 1e-10);
        // (2/π)∫_{π/4}^{3π/4} sin² = 1/2 + 1/π
        let m = mass_in_window(ground, PI / 2.0, PI / 4.0);
        assert!((m - (0.5 + 1.0 / PI)).abs() < 1e-5, "{m}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CylinderGrid::new(0.0, 1.0, 10, 1, |t| t - 0.5).is_err());
        let grid = flat(10);
        assert!(solve_sturm_liouville(&grid, 0, 0).is_err());
        assert!(solve_sturm_liouville(&grid, 0, 11).is_err());
    }
}
