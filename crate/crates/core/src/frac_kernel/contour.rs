//! Laplace-inversion oracles for the scalar problems.
//!
//! Continuous solutions are written as
//!
//! ```text
//! ξ(t) = (ξ₀/2πi) ∫_Υ e^{tz} z^α / (z^{1+α} + λ) dz          (homogeneous)
//! ξ(t) = (1/2πi)  ∫_Υ e^{tz} / (z² + λ z^{1-α}) dz             (forced, f ≡ 1)
//! ```
//!
//! and the discrete solutions of the time-stepping recurrence as
//!
//! ```text
//! Y_k = (ξ₀/2πi) ∫_{Υ₁} e^{kz} / ((1 + μψ(z)) (e^z - 1)) dz
//! Y_k = (τ/2πi)  ∫_{Υ₁} e^{(k+1)z} / ((1 + μψ(z)) (e^z - 1)²) dz
//! ```
//!
//! where `Υ` consists of the rays `[0,∞)e^{±iθ}` and `Υ₁` keeps the part with
//! `|Im z| ≤ π`. Near the origin the rays are replaced by the arc `|z| = ρ`,
//! `|arg z| ≤ θ`, which passes to the right of the branch point; no
//! singularity lies in the sector between the two paths, so the value is
//! unchanged. All integrands are conjugate symmetric, so only the upper half
//! is integrated and the result is `Im(∫_upper)/π`.
//!
//! Every integral is evaluated in a scaled variable (`s = tz` or `s = kz`), in
//! which the arc has radius one and the rays are cut where `e^{s}` falls
//! below the tolerance.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use super::psi::{exp_m1_c, psi_eval};
use super::quad::{self, NodeSet};
use super::FracOrder;
use crate::error::{argument, domain, Error, Result};

const MAX_PANELS: usize = 40_000;
/// Time steps below this index are evaluated one by one by the series
/// routines; later ones share one rule per octave.
const SERIES_DIRECT: usize = 64;

/// Ray angle and accuracy target of the contour `Υ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    theta: f64,
    tol: f64,
}

impl ContourSpec {
    /// Default contour for `alpha`: the angle sits midway between `π/2` and
    /// the upper end `(α+3)π/(4α+4)` of the admissible window, capped at
    /// `3π/4`.
    pub fn new(alpha: FracOrder, tol: f64) -> Result<Self> {
        Self::with_theta(alpha, default_theta(alpha), tol)
    }

    pub fn with_theta(alpha: FracOrder, theta: f64, tol: f64) -> Result<Self> {
        let spec = ContourSpec { theta, tol };
        spec.check(alpha)?;
        Ok(spec)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Radius beyond which `e^{t r cos θ} < tol`.
    pub fn r_max(&self, t: f64) -> f64 {
        self.tol.ln() / (t * self.theta.cos())
    }

    fn check(&self, alpha: FracOrder) -> Result<()> {
        let upper = (alpha.value() + 3.0) / (4.0 * alpha.value() + 4.0) * PI;
        if !(self.theta > FRAC_PI_2 && self.theta <= upper) {
            return Err(argument(format!(
                "contour angle {} outside ({}, {}] for alpha = {}",
                self.theta,
                FRAC_PI_2,
                upper,
                alpha.value()
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(argument(format!("contour tolerance must lie in (0,1), got {}", self.tol)));
        }
        Ok(())
    }

    /// Scaled truncation radius `ln(tol)/cos θ` (time one).
    fn scaled_cut(&self) -> f64 {
        self.r_max(1.0)
    }
}

fn default_theta(alpha: FracOrder) -> f64 {
    let upper = (alpha.value() + 3.0) / (4.0 * alpha.value() + 4.0) * PI;
    (0.5 * (FRAC_PI_2 + upper)).min(0.75 * PI)
}

/// Upper half of the keyhole path: the arc `e^{iφ}`, `φ ∈ [0, θ]`, and the
/// ray `r e^{iθ}`, `r ∈ [1, r_end]`. Returns the merged complex nodes with
/// `ds` folded into the weights, and the integral of each component.
struct UpperPath {
    nodes: Vec<C64>,
    weights: Vec<C64>,
    value: Vec<C64>,
}

fn upper_path<F>(mut g: F, theta: f64, r_end: f64, dim: usize, tol: f64) -> Result<UpperPath>
where
    F: FnMut(C64, &mut [C64]),
{
    let arc = quad::adaptive(
        |phi, out: &mut [C64]| {
            let s = C64::from_polar(1.0, phi);
            g(s, out);
            let ds = C64::i() * s;
            out.iter_mut().for_each(|v| *v *= ds);
        },
        &[0.0, 0.5 * theta, theta],
        dim,
        0.25 * tol,
        MAX_PANELS,
    )?;
    let dir = C64::from_polar(1.0, theta);
    let mut breaks = vec![1.0];
    let mut r = 1.0;
    while r < r_end {
        r = (2.0 * r).min(r + 8.0).min(r_end);
        breaks.push(r);
    }
    let ray = if r_end > 1.0 {
        Some(quad::adaptive(
            |r, out: &mut [C64]| {
                g(dir * r, out);
                out.iter_mut().for_each(|v| *v *= dir);
            },
            &breaks,
            dim,
            0.75 * tol,
            MAX_PANELS,
        )?)
    } else {
        None
    };
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    push_arc(&arc.rule, &mut nodes, &mut weights);
    let mut value = arc.value;
    if let Some(ray) = ray {
        for (&r, &w) in ray.rule.x.iter().zip(&ray.rule.w) {
            nodes.push(dir * r);
            weights.push(dir * w);
        }
        for (v, u) in value.iter_mut().zip(&ray.value) {
            *v += u;
        }
    }
    Ok(UpperPath { nodes, weights, value })
}

fn push_arc(rule: &NodeSet, nodes: &mut Vec<C64>, weights: &mut Vec<C64>) {
    for (&phi, &w) in rule.x.iter().zip(&rule.w) {
        let s = C64::from_polar(1.0, phi);
        nodes.push(s);
        weights.push(C64::i() * s * w);
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("evaluation time must be positive, got {t}")));
    }
    Ok(())
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(domain(format!("{name} must be finite and non-negative, got {v}")));
    }
    Ok(())
}

fn hom_kernel(x: f64, a: f64) -> impl Fn(C64) -> C64 {
    move |s: C64| s.powf(a) / (s.powf(1.0 + a) + x)
}

fn forced_kernel(x: f64, a: f64) -> impl Fn(C64) -> C64 {
    move |s: C64| 1.0 / (s * s + x * s.powf(1.0 - a))
}

/// `ξ(t)` of the homogeneous scalar problem `ξ' + λ D^{-α}ξ = 0`,
/// `ξ(0) = ξ₀`, which equals `ξ₀ E_{1+α,1}(-λt^{1+α})`.
pub fn contour_xi_hom(lambda: f64, alpha: FracOrder, t: f64, xi0: f64, spec: &ContourSpec) -> Result<f64> {
    spec.check(alpha)?;
    check_time(t)?;
    check_rate("lambda", lambda)?;
    if lambda == 0.0 || xi0 == 0.0 {
        return Ok(xi0);
    }
    let a = alpha.value();
    let g = hom_kernel(lambda * t.powf(1.0 + a), a);
    let path = upper_path(|s, out| out[0] = s.exp() * g(s), spec.theta, spec.scaled_cut(), 1, spec.tol * PI)?;
    Ok(xi0 * path.value[0].im / PI)
}

/// `ξ(t)` of `ξ' + λ D^{-α}ξ = 1`, `ξ(0) = 0`, i.e. `t E_{1+α,2}(-λt^{1+α})`.
pub fn contour_xi_forced(lambda: f64, alpha: FracOrder, t: f64, spec: &ContourSpec) -> Result<f64> {
    spec.check(alpha)?;
    check_time(t)?;
    check_rate("lambda", lambda)?;
    if lambda == 0.0 {
        return Ok(t);
    }
    let a = alpha.value();
    let g = forced_kernel(lambda * t.powf(1.0 + a), a);
    let path = upper_path(|s, out| out[0] = s.exp() * g(s), spec.theta, spec.scaled_cut(), 1, spec.tol * PI)?;
    Ok(t * path.value[0].im / PI)
}

/// Shared octave loop of the series routines. `kernel(x0)` is the scaled
/// integrand without the exponential for the octave starting at `t0`, and
/// `scale(t0)` multiplies the octave's results.
fn octave_series<K, G>(
    lambda: f64,
    alpha: FracOrder,
    tau: f64,
    k_max: usize,
    spec: &ContourSpec,
    kernel: K,
    scale: impl Fn(f64) -> f64,
    out: &mut [f64],
) -> Result<()>
where
    K: Fn(f64) -> G,
    G: Fn(C64) -> C64,
{
    let a = alpha.value();
    let mut k0 = SERIES_DIRECT;
    while k0 <= k_max {
        let t0 = k0 as f64 * tau;
        let g = kernel(lambda * t0.powf(1.0 + a));
        // one rule fitted to the ends and the middle of the octave
        let rhos = [1.0, 1.5, 2.0];
        let path = upper_path(
            |s, v| {
                let base = g(s);
                for (vi, &rho) in v.iter_mut().zip(&rhos) {
                    *vi = (s * rho).exp() * base;
                }
            },
            spec.theta,
            spec.scaled_cut(),
            rhos.len(),
            spec.tol * PI,
        )?;
        let mut cur: Vec<C64> = path.nodes.iter().map(|&s| s.exp()).collect();
        let step: Vec<C64> = path.nodes.iter().map(|&s| (s / k0 as f64).exp()).collect();
        let coef: Vec<C64> = path.nodes.iter().zip(&path.weights).map(|(&s, &w)| w * g(s)).collect();
        let k_end = (2 * k0).min(k_max + 1);
        let sc = scale(t0) / PI;
        for slot in out.iter_mut().take(k_end).skip(k0) {
            let mut acc = C64::new(0.0, 0.0);
            for ((c, e), st) in coef.iter().zip(cur.iter_mut()).zip(&step) {
                acc += c * *e;
                *e *= st;
            }
            *slot = sc * acc.im;
        }
        k0 *= 2;
    }
    Ok(())
}

/// `ξ(kτ)` for `k = 0..=k_max` of the homogeneous problem. Equivalent to
/// calling [`contour_xi_hom`] at every `kτ`; the later octaves share one
/// quadrature rule each.
pub fn contour_xi_hom_series(
    lambda: f64,
    alpha: FracOrder,
    tau: f64,
    k_max: usize,
    xi0: f64,
    spec: &ContourSpec,
) -> Result<Vec<f64>> {
    spec.check(alpha)?;
    check_time(tau)?;
    check_rate("lambda", lambda)?;
    if lambda == 0.0 || xi0 == 0.0 {
        return Ok(vec![xi0; k_max + 1]);
    }
    let mut out = vec![0.0; k_max + 1];
    out[0] = xi0;
    for k in 1..SERIES_DIRECT.min(k_max + 1) {
        out[k] = contour_xi_hom(lambda, alpha, k as f64 * tau, xi0, spec)?;
    }
    let a = alpha.value();
    octave_series(lambda, alpha, tau, k_max, spec, |x| hom_kernel(x, a), |_| xi0, &mut out)?;
    Ok(out)
}

/// `ξ(kτ)` for `k = 0..=k_max` of the forced problem.
pub fn contour_xi_forced_series(
    lambda: f64,
    alpha: FracOrder,
    tau: f64,
    k_max: usize,
    spec: &ContourSpec,
) -> Result<Vec<f64>> {
    spec.check(alpha)?;
    check_time(tau)?;
    check_rate("lambda", lambda)?;
    if lambda == 0.0 {
        return Ok((0..=k_max).map(|k| k as f64 * tau).collect());
    }
    let mut out = vec![0.0; k_max + 1];
    for k in 1..SERIES_DIRECT.min(k_max + 1) {
        out[k] = contour_xi_forced(lambda, alpha, k as f64 * tau, spec)?;
    }
    let a = alpha.value();
    octave_series(lambda, alpha, tau, k_max, spec, |x| forced_kernel(x, a), |t0| t0, &mut out)?;
    Ok(out)
}

fn check_index(k: usize) -> Result<()> {
    if k == 0 {
        return Err(argument("the discrete contour formula needs k ≥ 1"));
    }
    Ok(())
}

/// Upper-half integral over `Υ₁` in the variable `s = kz`. `g(z)` receives
/// the unscaled point and returns the integrand in `z`.
fn discrete_upper(k: usize, spec: &ContourSpec, mut g: impl FnMut(C64) -> Result<C64>) -> Result<C64> {
    let kf = k as f64;
    // Υ₁ ends where Im z = π
    let r_end = (kf * PI / spec.theta.sin()).min(spec.scaled_cut());
    let mut failure: Option<Error> = None;
    let path = upper_path(
        |s, out| {
            out[0] = match g(s / kf) {
                Ok(v) => v / kf,
                Err(e) => {
                    failure.get_or_insert(e);
                    C64::new(0.0, 0.0)
                }
            }
        },
        spec.theta,
        r_end,
        1,
        spec.tol * PI,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(path.value[0])
}

/// Contour value of `Y_k` for the homogeneous recurrence with parameter
/// `mu = λτ^{1+α}`.
pub fn contour_yk_hom(mu: f64, alpha: FracOrder, k: usize, xi0: f64, spec: &ContourSpec) -> Result<f64> {
    spec.check(alpha)?;
    check_index(k)?;
    check_rate("mu", mu)?;
    if mu == 0.0 || xi0 == 0.0 {
        return Ok(xi0);
    }
    let kf = k as f64;
    let v = discrete_upper(k, spec, |z| {
        let psi = psi_eval(z, alpha)?;
        Ok((z * kf).exp() / ((1.0 + mu * psi) * exp_m1_c(z)))
    })?;
    Ok(xi0 * v.im / PI)
}

/// Contour value of `Y_k` for the forced recurrence (unit source, step
/// `tau`).
pub fn contour_yk_forced(mu: f64, alpha: FracOrder, k: usize, tau: f64, spec: &ContourSpec) -> Result<f64> {
    spec.check(alpha)?;
    check_index(k)?;
    check_rate("mu", mu)?;
    check_time(tau)?;
    if mu == 0.0 {
        return Ok(k as f64 * tau);
    }
    let kf = k as f64;
    let v = discrete_upper(k, spec, |z| {
        let psi = psi_eval(z, alpha)?;
        let em1 = exp_m1_c(z);
        Ok((z * (kf + 1.0)).exp() / ((1.0 + mu * psi) * em1 * em1))
    })?;
    Ok(tau * v.im / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac_kernel::mittag_leffler;

    fn fo(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn default_angle_is_admissible() {
        for &a in &[0.05, 0.2, 0.5, 0.8, 0.99] {
            let spec = ContourSpec::new(fo(a), 1e-12).unwrap();
            assert!(spec.theta() > FRAC_PI_2);
        }
        assert!(ContourSpec::with_theta(fo(0.8), 2.0, 1e-12).is_err());
        assert!(ContourSpec::with_theta(fo(0.8), 1.5, 1e-12).is_err());
    }

    #[test]
    fn degenerate_inputs_short_circuit() {
        let spec = ContourSpec::new(fo(0.5), 1e-12).unwrap();
        assert_eq!(contour_xi_hom(0.0, fo(0.5), 0.3, 2.5, &spec).unwrap(), 2.5);
        assert_eq!(contour_xi_forced(0.0, fo(0.5), 0.3, &spec).unwrap(), 0.3);
        assert_eq!(contour_yk_hom(0.0, fo(0.5), 7, 1.5, &spec).unwrap(), 1.5);
        assert_eq!(contour_yk_forced(0.0, fo(0.5), 7, 0.1, &spec).unwrap(), 7.0 * 0.1);
        assert!(contour_yk_hom(1.0, fo(0.5), 0, 1.0, &spec).is_err());
        assert!(contour_xi_hom(1.0, fo(0.5), 0.0, 1.0, &spec).is_err());
    }

    #[test]
    fn homogeneous_matches_mittag_leffler() {
        for &a in &[0.2, 0.5, 0.8] {
            let spec = ContourSpec::new(fo(a), 1e-13).unwrap();
            for &(lam, t) in &[(1.0, 0.3), (1.0, 1.0), (9.87, 1.0), (50.0, 0.7), (3.0, 3.0)] {
                let x = lam * f64::powf(t, 1.0 + a);
                let ml = mittag_leffler(1.0 + a, 1.0, C64::new(-x, 0.0)).unwrap().re;
                let got = contour_xi_hom(lam, fo(a), t, 1.0, &spec).unwrap();
                assert!((got - ml).abs() < 1e-10, "alpha {a} lam {lam} t {t}: {got} vs {ml}");
                let ml2 = t * mittag_leffler(1.0 + a, 2.0, C64::new(-x, 0.0)).unwrap().re;
                let got2 = contour_xi_forced(lam, fo(a), t, &spec).unwrap();
                assert!((got2 - ml2).abs() < 1e-10, "forced alpha {a}: {got2} vs {ml2}");
            }
        }
    }

    #[test]
    fn series_matches_single_evaluations() {
        let a = fo(0.4);
        let spec = ContourSpec::new(a, 1e-12).unwrap();
        let tau = 1.0 / 64.0;
        let hom = contour_xi_hom_series(20.0, a, tau, 700, 1.0, &spec).unwrap();
        let forced = contour_xi_forced_series(20.0, a, tau, 700, &spec).unwrap();
        for &k in &[1, 63, 64, 100, 127, 128, 300, 511, 512, 700] {
            let t = k as f64 * tau;
            let h = contour_xi_hom(20.0, a, t, 1.0, &spec).unwrap();
            let f = contour_xi_forced(20.0, a, t, &spec).unwrap();
            assert!((hom[k] - h).abs() < 1e-11, "k {k}: {} vs {h}", hom[k]);
            assert!((forced[k] - f).abs() < 1e-11 * t.max(1.0), "k {k}: {} vs {f}", forced[k]);
        }
    }

    #[test]
    fn first_discrete_step_closed_forms() {
        let a = fo(0.5);
        let spec = ContourSpec::new(a, 1e-13).unwrap();
        let b1 = 1.0 / crate::frac_kernel::gamma_fn(2.5).unwrap();
        let y1 = contour_yk_hom(1.0, a, 1, 1.0, &spec).unwrap();
        assert!((y1 - 1.0 / (1.0 + b1)).abs() < 1e-11, "{y1}");
        let z1 = contour_yk_forced(1.0, a, 1, 0.25, &spec).unwrap();
        assert!((z1 - 0.25 / (1.0 + b1)).abs() < 1e-11, "{z1}");
    }
}
