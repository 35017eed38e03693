//! Log-space Gamma ratios and related closed forms.
//!
//! Only ratios are ever needed, and for the degrees used on the sphere
//! (up to ~10⁷) a difference of two `lnΓ` values would lose eight digits, so
//! the ratio is expanded directly.

/// Stirling correction `lnΓ(z) - [(z-½)ln z - z + ½ln 2π]` for large `z`.
fn stirling_tail(z: f64) -> f64 {
    let z2 = z * z;
    let inv = 1.0 / z;
    inv * (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2)
}

const SHIFT_THRESHOLD: f64 = 20.0;

/// `ln Γ(z + a) − ln Γ(z)` for `z > 0`, `z + a > 0`.
pub fn ln_gamma_ratio(z: f64, a: f64) -> f64 {
    assert!(z > 0.0 && z + a > 0.0, "ln_gamma_ratio: arguments must be positive");
    if a == 0.0 {
        return 0.0;
    }
    // recurrence Γ(z+1) = zΓ(z) lifts z into the asymptotic range
    let mut correction = 0.0;
    let mut z = z;
    while z < SHIFT_THRESHOLD || z + a < SHIFT_THRESHOLD {
        correction -= (z + a).ln() - z.ln();
        z += 1.0;
    }
    (z - 0.5) * (a / z).ln_1p() + a * (z + a).ln() - a + stirling_tail(z + a) - stirling_tail(z)
        + correction
}

/// `ln( C(2m, m) / 4^m ) = ln Γ(m+½) − ln Γ(m+1) − ½ ln π`.
pub fn ln_central_binomial_over_4m(m: u64) -> f64 {
    if m < 64 {
        let mut acc = 0.0;
        for j in 1..=m {
            acc += (-0.5 / j as f64).ln_1p();
        }
        acc
    } else {
        ln_gamma_ratio(m as f64 + 1.0, -0.5) - 0.5 * std::f64::consts::PI.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial(n: u64) -> f64 {
        (1..=n).map(|k| (k as f64).ln()).sum()
    }

    #[test]
    fn gamma_ratio_matches_factorials() {
        for n in [1u64, 2, 5, 17, 40, 120] {
            // Γ(n+1+3)/Γ(n+1) = (n+1)(n+2)(n+3)
            let exact = ((n + 1) * (n + 2) * (n + 3)) as f64;
            let got = ln_gamma_ratio(n as f64 + 1.0, 3.0).exp();
            assert!((got / exact - 1.0).abs() < 1e-13, "n={n}: {got} vs {exact}");
        }
        let got = ln_gamma_ratio(1.0, 10.0);
        assert!((got - ln_factorial(10)).abs() < 1e-12);
    }

    #[test]
    fn half_integer_ratio() {
        // Γ(1/2) = √π, Γ(3/2) = √π/2
        assert!((ln_gamma_ratio(0.5, 1.0) - 0.5f64.ln()).abs() < 1e-14);
        // Γ(m+½)/Γ(m+1) ~ m^{-1/2}(1 - 1/(8m))
        let m = 1.0e7;
        let got = ln_gamma_ratio(m + 1.0, -0.5);
        let approx = -0.5 * m.ln() - 1.0 / (8.0 * m);
        assert!((got - approx).abs() < 1e-13);
    }

    #[test]
    fn central_binomial_branches_agree() {
        for m in [64u64, 65, 100, 1000] {
            let mut acc = 0.0;
            for j in 1..=m {
                acc += (-0.5 / j as f64).ln_1p();
            }
            let got = ln_central_binomial_over_4m(m);
            assert!((got - acc).abs() < 1e-12, "m={m}: {got} vs {acc}");
        }
    }
}
