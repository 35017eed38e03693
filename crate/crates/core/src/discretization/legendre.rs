//! Orthonormal associated Legendre functions in colatitude.
//!
//! `P̄_l^m(θ)` satisfies `∫₀^π P̄_l^m P̄_{l'}^m sinθ dθ = δ_{ll'}` and carries the
//! Condon–Shortley phase, so that `Y_{l,m}(θ,φ) = P̄_l^m(θ) e^{imφ}/√(2π)` is
//! orthonormal on S². Negative orders use `Y_{l,-m} = (-1)^m conj(Y_{l,m})`.
//!
//! The sectoral seed `P̄_m^m = (-1)^m c_m sin^m θ` is formed in log space, which
//! keeps orders in the millions representable; the upward recurrence in `l`
//! is stable.

use crate::special::ln_central_binomial_over_4m;
use crate::C64;

/// `ln c_m` with `c_m² = (2m+1)! / (2·4^m·(m!)²)`.
pub fn ln_sectoral_constant(m: usize) -> f64 {
    0.5 * (((2 * m + 1) as f64 / 2.0).ln() + ln_central_binomial_over_4m(m as u64))
}

/// Natural log of `|sin θ|`, accurate near the equator.
pub fn ln_sin(theta: f64) -> f64 {
    let eps = theta - std::f64::consts::FRAC_PI_2;
    if eps.abs() < 0.5 {
        let s = (0.5 * eps).sin();
        (-2.0 * s * s).ln_1p()
    } else {
        theta.sin().abs().ln()
    }
}

/// Fill `out[j] = P̄_{m+j}^m(θ)` for `j = 0 ..= l_max − m`.
pub fn column_into(m: usize, l_max: usize, theta: f64, out: &mut [f64]) {
    assert!(l_max >= m, "column_into: l_max < m");
    assert_eq!(out.len(), l_max - m + 1);
    let x = theta.cos();
    let ln_seed = ln_sectoral_constant(m) + if m == 0 { 0.0 } else { m as f64 * ln_sin(theta) };
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    let seed = if ln_seed < -740.0 { 0.0 } else { sign * ln_seed.exp() };
    out[0] = seed;
    if l_max == m {
        return;
    }
    out[1] = ((2 * m + 3) as f64).sqrt() * x * seed;
    let mf = m as f64;
    let mut prev_a = ((2 * m + 3) as f64).sqrt();
    for j in 2..out.len() {
        let l = mf + j as f64;
        let a = (((2.0 * l - 1.0) * (2.0 * l + 1.0)) / ((l - mf) * (l + mf))).sqrt();
        out[j] = a * (x * out[j - 1] - out[j - 2] / prev_a);
        prev_a = a;
    }
}

pub fn column(m: usize, l_max: usize, theta: f64) -> Vec<f64> {
    let mut out = vec![0.0; l_max - m + 1];
    column_into(m, l_max, theta, &mut out);
    out
}

/// The θ-factor of `Y_{l,m}` for signed `m`, i.e. `√(2π)·Y_{l,m}(θ,0)`.
pub fn theta_factor(l: usize, m: i64, theta: f64) -> f64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return 0.0;
    }
    let v = column(am, l, theta)[l - am];
    if m < 0 && am % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `Y_{l,m}(θ, φ)`.
pub fn spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> C64 {
    let r = theta_factor(l, m, theta) / (2.0 * std::f64::consts::PI).sqrt();
    C64::from_polar(r, m as f64 * phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_degree_closed_forms() {
        let th: f64 = 0.7;
        let (x, s) = (th.cos(), th.sin());
        // Y_00 = 1/√(4π); Y_10 = √(3/4π) cosθ; Y_11 = -√(3/8π) sinθ e^{iφ}
        let y00 = spherical_harmonic(0, 0, th, 0.3);
        assert!((y00.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        let y10 = spherical_harmonic(1, 0, th, 0.0).re;
        assert!((y10 - (3.0 / (4.0 * PI)).sqrt() * x).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, th, 0.0).re;
        assert!((y11 + (3.0 / (8.0 * PI)).sqrt() * s).abs() < 1e-15);
        // Y_30 = √(7/16π)(5x³ − 3x)
        let y30 = spherical_harmonic(3, 0, th, 0.0).re;
        assert!((y30 - (7.0 / (16.0 * PI)).sqrt() * (5.0 * x * x * x - 3.0 * x)).abs() < 1e-14);
        // Y_{1,-1} = -conj(Y_{1,1})
        let a = spherical_harmonic(1, -1, th, 0.4);
        let b = spherical_harmonic(1, 1, th, 0.4);
        assert!((a + b.conj()).norm() < 1e-15);
    }

    #[test]
    fn huge_order_seed_is_finite_near_equator() {
        let m = 10_000_000;
        let col = column(m, m + 4, PI / 2.0);
        // c_m ~ (m/π)^{1/4}
        let expected = (m as f64 / PI).powf(0.25);
        assert!((col[0].abs() / expected - 1.0).abs() < 1e-6);
        assert!(col.iter().all(|v| v.is_finite()));
        // odd-parity members vanish at the equator
        assert!(col[1].abs() < 1e-9 * expected && col[3].abs() < 1e-9 * expected);
    }
}
