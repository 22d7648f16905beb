//! Riemann-Liouville fractional integrals of functions that are constant on
//! the slabs of a [`TimeGrid`], evaluated in closed form.

use super::gamma::gamma_real;
use crate::dg_solver::TimeGrid;
use crate::error::{argument, domain, Result};

fn check(values: &[f64], grid: &TimeGrid, beta: f64) -> Result<()> {
    if values.len() != grid.steps() {
        return Err(argument(format!("expected {} slab values, got {}", grid.steps(), values.len())));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(domain(format!("order beta must lie in (0,1], got {beta}")));
    }
    Ok(())
}

/// `(D_{0+}^{-β} v)(t) = 1/Γ(β) ∫_0^t (t-s)^{β-1} v(s) ds` for `0 < t ≤ T`.
///
/// A slab value `c` on `(t_{j-1}, t_j)` contributes
/// `c·((t-t_{j-1})_+^β - (t-t_j)_+^β)/Γ(1+β)`.
pub fn rl_integral_pc_left(values: &[f64], grid: &TimeGrid, beta: f64, t: f64) -> Result<f64> {
    check(values, grid, beta)?;
    let tf = grid.final_time();
    if !(t > 0.0 && t <= tf) {
        return Err(domain(format!("left integral needs t in (0, {tf}], got {t}")));
    }
    let pos = |x: f64| if x > 0.0 { x.powf(beta) } else { 0.0 };
    let mut acc = 0.0;
    for (j, &c) in values.iter().enumerate() {
        let lo = grid.t(j);
        if lo >= t {
            break;
        }
        acc += c * (pos(t - lo) - pos(t - grid.t(j + 1)));
    }
    Ok(acc / gamma_real(1.0 + beta))
}

/// `(D_{T-}^{-β} v)(t) = 1/Γ(β) ∫_t^T (s-t)^{β-1} v(s) ds` for `0 ≤ t < T`.
pub fn rl_integral_pc_right(values: &[f64], grid: &TimeGrid, beta: f64, t: f64) -> Result<f64> {
    check(values, grid, beta)?;
    let tf = grid.final_time();
    if !(t >= 0.0 && t < tf) {
        return Err(domain(format!("right integral needs t in [0, {tf}), got {t}")));
    }
    let pos = |x: f64| if x > 0.0 { x.powf(beta) } else { 0.0 };
    let mut acc = 0.0;
    for (j, &c) in values.iter().enumerate().rev() {
        let hi = grid.t(j + 1);
        if hi <= t {
            break;
        }
        acc += c * (pos(hi - t) - pos(grid.t(j) - t));
    }
    Ok(acc / gamma_real(1.0 + beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac_kernel::quad::tanh_sinh;

    #[test]
    fn constant_data() {
        let grid = TimeGrid::new(2.0, 8).unwrap();
        let ones = vec![1.0; 8];
        for &beta in &[0.3, 0.5, 1.0] {
            for &t in &[0.1, 0.7, 1.25, 2.0] {
                let left = rl_integral_pc_left(&ones, &grid, beta, t).unwrap();
                assert!((left - t.powf(beta) / gamma_real(1.0 + beta)).abs() < 1e-14);
                if t < 2.0 {
                    let right = rl_integral_pc_right(&ones, &grid, beta, t).unwrap();
                    assert!((right - (2.0 - t).powf(beta) / gamma_real(1.0 + beta)).abs() < 1e-14);
                }
            }
        }
        assert!((rl_integral_pc_left(&ones, &grid, 1.0, 1.3).unwrap() - 1.3).abs() < 1e-15);
        assert!((rl_integral_pc_right(&ones, &grid, 1.0, 1.3).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn indicator_against_quadrature_of_definition() {
        // v = 1 on (0.25, 0.5), β = 0.5, t = 1
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let v = [0.0, 1.0, 0.0, 0.0];
        let got = rl_integral_pc_left(&v, &grid, 0.5, 1.0).unwrap();
        let quad = tanh_sinh(|s| (1.0 - s).powf(-0.5), 0.25, 0.5, 1e-15) / gamma_real(0.5);
        let closed = (0.75f64.sqrt() - 0.5f64.sqrt()) / gamma_real(1.5);
        assert!((got - quad).abs() < 1e-13);
        assert!((got - closed).abs() < 1e-15);
    }

    #[test]
    fn domain_and_size_checks() {
        let grid = TimeGrid::new(1.0, 4).unwrap();
        let v = [1.0; 4];
        assert!(rl_integral_pc_left(&v, &grid, 0.5, 0.0).is_err());
        assert!(rl_integral_pc_left(&v, &grid, 0.5, 1.5).is_err());
        assert!(rl_integral_pc_right(&v, &grid, 0.5, 1.0).is_err());
        assert!(rl_integral_pc_left(&v[..3], &grid, 0.5, 0.5).is_err());
        assert!(rl_integral_pc_left(&v, &grid, 1.5, 0.5).is_err());
    }
}
