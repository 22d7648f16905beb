//! The generating function of the convolution weights,
//!
//! ```text
//! ψ(z) = (e^z - 1)/Γ(2+α) · Σ_{k≥1} k^{1+α} e^{-kz}
//!      = (e^z - 1) · Σ_{k∈Z} (z + 2kπi)^{-2-α},      |Im z| < 2π, z ∉ (-∞, 0].
//! ```
//!
//! The exponential series converges geometrically for `Re z > 0` and is used
//! from `Re z ≥ 1`; below that the bilateral power series is summed for
//! `|k| ≤ K_PSI` and the two tails are replaced by their midpoint
//! Euler-Maclaurin expansion (integral plus two derivative corrections).

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::gamma::gamma_real;
use super::FracOrder;
use crate::error::{domain, Result};

/// Terms kept on each side of the bilateral series. With the tail
/// correction through the third derivative the neglected remainder is of
/// size `(2πK)^{-7-α}·(2π)^5·Π(p..p+4)·31/967680`, below 1e-16 for K = 32.
pub(crate) const K_PSI: i64 = 32;

/// `e^z - 1` without cancellation near the origin.
pub(crate) fn exp_m1_c(z: C64) -> C64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    let em1 = z.re.exp_m1();
    C64::new(em1 * c - 2.0 * half * half, z.re.exp() * s)
}

/// Exponential-series representation; converges for `Re z > 0`.
pub fn psi_exponential_series(z: C64, alpha: FracOrder) -> C64 {
    let p = 1.0 + alpha.value();
    let q = (-z).exp();
    let mut qk = q;
    let mut sum = C64::new(0.0, 0.0);
    let mut k = 1.0f64;
    loop {
        let term = qk * k.powf(p);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() && k > 4.0 {
            break;
        }
        if k > 1e5 {
            break;
        }
        qk *= q;
        k += 1.0;
    }
    exp_m1_c(z) * sum / gamma_real(2.0 + alpha.value())
}

/// Bilateral power-series representation, valid for `|Im z| < 2π` off the
/// negative real axis.
pub fn psi_power_series(z: C64, alpha: FracOrder) -> C64 {
    let p = 2.0 + alpha.value();
    let mut sum = C64::new(0.0, 0.0);
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    for k in 1..=K_PSI {
        let kk = k as f64;
        sum += (z + two_pi_i * kk).powf(-p) + (z - two_pi_i * kk).powf(-p);
    }
    let a = K_PSI as f64 + 0.5;
    for c in [two_pi_i, -two_pi_i] {
        let w = z + c * a;
        let wp = w.powf(-p);
        let integral = wp * w / ((p - 1.0) * c);
        let d1 = -p * c * wp / w;
        let d3 = -p * (p + 1.0) * (p + 2.0) * c * c * c * wp / (w * w * w);
        sum += integral + d1 / 24.0 - d3 * (7.0 / 5760.0);
    }
    // the k = 0 term is written as ((e^z-1)/z)·z^{-1-α} so that it stays
    // finite for tiny |z|
    let em1 = exp_m1_c(z);
    em1 * sum + (em1 / z) * z.powf(1.0 - p)
}

/// ψ(z) for `α ∈ (0,1)`.
pub fn psi_eval(z: C64, alpha: FracOrder) -> Result<C64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(domain("psi_eval: non-finite argument"));
    }
    if z.im.abs() >= 2.0 * PI {
        return Err(domain(format!("psi_eval: |Im z| must be below 2π, got {}", z.im)));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(domain(format!("psi_eval: z = {z} lies on the branch cut (-∞, 0]")));
    }
    if z.re >= 1.0 {
        Ok(psi_exponential_series(z, alpha))
    } else {
        Ok(psi_power_series(z, alpha))
    }
}
