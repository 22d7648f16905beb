//! Gamma function: exact products for integers, otherwise an upward shift
//! to `x ≥ 12` followed by Stirling's series, with reflection below one half.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const SHIFT_TO: f64 = 12.0;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// `ln Γ(y) - [(y-1/2) ln y - y + ln √(2π)]` for `y ≥ 12`.
fn stirling_correction(y: f64) -> f64 {
    // B_{2k} / (2k (2k-1)), k = 1..8
    const C: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let r = 1.0 / y;
    let r2 = r * r;
    let mut acc = 0.0;
    for c in C.iter().rev() {
        acc = acc * r2 + c;
    }
    acc * r
}

/// Γ(y) for `y ≥ 12`, using `pow` (accurate to an ulp for any exponent) in
/// two halves to stay clear of overflow.
fn gamma_large(y: f64) -> f64 {
    let half = y.powf(0.5 * (y - 0.5));
    half * (half * (-y).exp()) * SQRT_2PI * stirling_correction(y).exp()
}

/// Γ(x) for any real `x` that is not a non-positive integer.
pub(crate) fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        return PI / (s * gamma_real(1.0 - x));
    }
    if x == x.floor() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let mut y = x;
    let mut prod = 1.0;
    while y < SHIFT_TO {
        prod *= y;
        y += 1.0;
    }
    gamma_large(y) / prod
}

/// Γ(x) for `x > 0`, relative accuracy a few ulps.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("gamma_fn requires a positive finite argument, got {x}")));
    }
    Ok(gamma_real(x))
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < SHIFT_TO {
        gamma_real(x).ln()
    } else {
        (x - 0.5) * x.ln() - x + HALF_LN_2PI + stirling_correction(x)
    }
}

/// 1/Γ(x) for every real `x`; exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        let g = gamma_real(1.0 - x);
        if g.is_infinite() {
            return (PI * x).sin() * (ln_gamma(1.0 - x) - PI.ln()).exp();
        }
        (PI * x).sin() * g / PI
    } else if x > 170.0 {
        (-ln_gamma(x)).exp()
    } else {
        1.0 / gamma_real(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!(rel(gamma_fn(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        // Γ(2.5) = (3/4)√π
        assert!(rel(gamma_fn(2.5).unwrap(), 0.75 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(2.5).unwrap(), 1.329_340_388_179_137) < 1e-14);
        let mut fact = 1.0;
        for n in 1..25 {
            fact *= n as f64;
            assert!(rel(gamma_fn(n as f64 + 1.0).unwrap(), fact) < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn rejects_non_positive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn recurrence_and_large_arguments() {
        for &x in &[0.013, 0.37, 1.2, 1.8, 3.3, 17.25, 99.5, 150.5] {
            let lhs = gamma_real(x + 1.0);
            let rhs = x * gamma_real(x);
            assert!(rel(lhs, rhs) < 2e-14, "x = {x}: {lhs} vs {rhs}");
        }
        assert!((ln_gamma(200.0) - 857.933_669_825_857_5).abs() < 1e-10);
    }

    #[test]
    fn reciprocal_gamma_at_negative_arguments() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        // Γ(-0.5) = -2√π
        assert!(rel(rgamma(-0.5), -0.5 / PI.sqrt()) < 1e-14);
        // Γ(-1.5) = 4√π/3
        assert!(rel(rgamma(-1.5), 3.0 / (4.0 * PI.sqrt())) < 1e-14);
    }
}
