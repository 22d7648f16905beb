//! Scalar versions of the time-stepping scheme.
//!
//! Projecting the scheme onto an eigenvector of the spatial operator with
//! eigenvalue `λ` leaves, with `μ = λτ^{1+α}`,
//!
//! ```text
//! (1 + μ b₁) Y_{k+1} = Y_k - μ Σ_{j=1}^{k} w_{k+1-j} Y_j (+ τ),
//! ```
//!
//! with `Y_0 = ξ₀` in the homogeneous case and `Y_0 = 0`, source term `τ`, in
//! the forced case. The memory sum is computed directly in `O(K²)`, which
//! keeps this module usable as an oracle for the PDE solver.

use crate::error::{argument, domain, Result};
use crate::frac_kernel::{
    contour_xi_forced_series, contour_xi_hom_series, conv_weights, ContourSpec, ConvolutionWeights, FracOrder,
};

/// Parameters of one scalar mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarProblem {
    alpha: FracOrder,
    lambda: f64,
    tau: f64,
    mu: f64,
    xi0: f64,
}

impl ScalarProblem {
    pub fn new(alpha: FracOrder, lambda: f64, tau: f64, xi0: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(domain(format!("lambda must be finite and non-negative, got {lambda}")));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(domain(format!("tau must be positive, got {tau}")));
        }
        if !xi0.is_finite() {
            return Err(argument("xi0 must be finite"));
        }
        let mu = lambda * tau.powf(1.0 + alpha.value());
        Ok(Self { alpha, lambda, tau, mu, xi0 })
    }

    /// Problem with prescribed `μ` and step `τ`; `λ = μ/τ^{1+α}`.
    pub fn from_mu(alpha: FracOrder, mu: f64, tau: f64, xi0: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(domain(format!("tau must be positive, got {tau}")));
        }
        let mut p = Self::new(alpha, mu / tau.powf(1.0 + alpha.value()), tau, xi0)?;
        p.mu = mu;
        Ok(p)
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn xi0(&self) -> f64 {
        self.xi0
    }
}

/// `Y_0, …, Y_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTrajectory {
    pub y: Vec<f64>,
}

impl ScalarTrajectory {
    /// Number of steps `K`.
    pub fn steps(&self) -> usize {
        self.y.len() - 1
    }
}

fn recurrence(p: &ScalarProblem, k_max: usize, y0: f64, source: f64) -> Result<ScalarTrajectory> {
    if k_max < 1 {
        return Err(argument("the recurrence needs K >= 1"));
    }
    let cw: ConvolutionWeights = conv_weights(p.alpha, k_max.max(2))?;
    let w = cw.w();
    let denom = 1.0 + p.mu * cw.b1();
    let mut y = Vec::with_capacity(k_max + 1);
    y.push(y0);
    for k in 0..k_max {
        // Σ_{j=1}^{k} w_{k+1-j} Y_j
        let mut hist = 0.0;
        for j in 1..=k {
            hist += w[k + 1 - j] * y[j];
        }
        y.push((y[k] + source - p.mu * hist) / denom);
    }
    Ok(ScalarTrajectory { y })
}

/// Homogeneous recurrence, `Y_0 = ξ₀`.
pub fn step_hom(p: &ScalarProblem, k_max: usize) -> Result<ScalarTrajectory> {
    recurrence(p, k_max, p.xi0, 0.0)
}

/// Forced recurrence with unit source, `Y_0 = 0`.
pub fn step_forced(p: &ScalarProblem, k_max: usize) -> Result<ScalarTrajectory> {
    recurrence(p, k_max, 0.0, p.tau)
}

/// Per-index ratios of an empirical decay estimate.
///
/// `ratio[k]` holds the normalised quantity at index `k` (`ratio[0]` is
/// unused and zero).
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub ratio: Vec<f64>,
}

impl DecayReport {
    /// Supremum over `2 ≤ k ≤ K`.
    pub fn constant(&self) -> f64 {
        self.sup_up_to(self.ratio.len() - 1)
    }

    /// Supremum over `2 ≤ k ≤ k_max`.
    pub fn sup_up_to(&self, k_max: usize) -> f64 {
        let end = k_max.min(self.ratio.len() - 1);
        self.ratio.iter().take(end + 1).skip(2).copied().fold(0.0, f64::max)
    }

    /// The value at `k = 1`, kept apart since the `1/k` bound is weakest there.
    pub fn first(&self) -> f64 {
        self.ratio.get(1).copied().unwrap_or(0.0)
    }
}

/// `k·|Y_{k+1} - Y_k|/|ξ₀|` for `k = 1..K-1` of the homogeneous trajectory.
/// A zero initial value gives zero jumps.
pub fn verify_jump_decay(p: &ScalarProblem, k_max: usize) -> Result<DecayReport> {
    let traj = step_hom(p, k_max)?;
    let mut ratio = vec![0.0; k_max.max(1)];
    if p.xi0 != 0.0 {
        for (k, r) in ratio.iter_mut().enumerate().skip(1) {
            *r = k as f64 * (traj.y[k + 1] - traj.y[k]).abs() / p.xi0.abs();
        }
    }
    Ok(DecayReport { ratio })
}

/// Which of the two scalar problems [`verify_error_decay`] examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Hom,
    Forced,
}

/// Distance between the recurrence and the exact solution at the grid
/// times: `k·|ξ(t_k) - Y_k|/|ξ₀|` (homogeneous) or `|ξ(t_k) - Y_k|/τ`
/// (forced), for `k = 1..=K`.
pub fn verify_error_decay(p: &ScalarProblem, k_max: usize, mode: Mode, spec: &ContourSpec) -> Result<DecayReport> {
    let mut ratio = vec![0.0; k_max + 1];
    match mode {
        Mode::Hom => {
            if p.xi0 == 0.0 {
                return Ok(DecayReport { ratio });
            }
            let traj = step_hom(p, k_max)?;
            let exact = contour_xi_hom_series(p.lambda, p.alpha, p.tau, k_max, p.xi0, spec)?;
            for k in 1..=k_max {
                ratio[k] = k as f64 * (exact[k] - traj.y[k]).abs() / p.xi0.abs();
            }
        }
        Mode::Forced => {
            let traj = step_forced(p, k_max)?;
            let exact = contour_xi_forced_series(p.lambda, p.alpha, p.tau, k_max, spec)?;
            for k in 1..=k_max {
                ratio[k] = (exact[k] - traj.y[k]).abs() / p.tau;
            }
        }
    }
    Ok(DecayReport { ratio })
}
