//! Scan grids and oracle comparisons backing the analysis of the scheme.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dg_solver::{run, stability_bound, SolverConfig, TimeGrid};
use crate::error::{argument, Error, Result};
use crate::fem1d::{
    assemble_mass, discrete_eigenpairs, eigenvalue_closed_form, l2_project, FemFunction, SpaceGrid1D,
    SpatialFunctionSpec,
};
use crate::frac_kernel::{
    contour_yk_forced, contour_yk_hom, psi_eval, quad, rl_integral_pc_left, rl_integral_pc_right, ContourSpec,
    FracOrder,
};
use crate::reference::experiment_data;
use crate::scalar_ode::{step_forced, step_hom, verify_error_decay, verify_jump_decay, Mode, ScalarProblem};

const ALPHAS: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Psi,
    Ode,
    Fem,
    Adjoint,
    Stability,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Psi, Suite::Ode, Suite::Fem, Suite::Adjoint, Suite::Stability];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "psi" => Suite::Psi,
            "ode" => Suite::Ode,
            "fem" => Suite::Fem,
            "adjoint" => Suite::Adjoint,
            "stability" => Suite::Stability,
            _ => return Err(argument(format!("unknown suite {s:?}"))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Psi => "psi",
            Suite::Ode => "ode",
            Suite::Fem => "fem",
            Suite::Adjoint => "adjoint",
            Suite::Stability => "stability",
        };
        f.write_str(s)
    }
}

/// One assertion of a suite with the measured quantity behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}/{}: {:.6e} ({})", self.suite, c.name, c.value, c.detail)?;
        }
        Ok(())
    }
}

fn check(name: impl Into<String>, passed: bool, value: f64, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, value, detail: detail.into() }
}

pub fn validate_lemmas(suite: Suite) -> Result<LemmaReport> {
    let checks = match suite {
        Suite::Psi => psi_suite()?,
        Suite::Ode => ode_suite()?,
        Suite::Fem => fem_suite()?,
        Suite::Adjoint => adjoint_suite()?,
        Suite::Stability => stability_suite()?,
    };
    Ok(LemmaReport { suite, checks })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn mu_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 25)
}

fn y_grid() -> Vec<f64> {
    (1..=200).map(|i| PI * i as f64 / 200.0).collect()
}

fn psi_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for &a in &ALPHAS {
        let alpha = FracOrder::new(a)?;
        let ys = y_grid();
        let psi_iy: Vec<C64> = ys.iter().map(|&y| psi_eval(C64::new(0.0, y), alpha)).collect::<Result<_>>()?;

        // |1+μψ(iy)| ≥ C(1+μy^{-1-α})
        let mut growth = f64::INFINITY;
        for &mu in &mu_grid() {
            for (&y, p) in ys.iter().zip(&psi_iy) {
                growth = growth.min((1.0 + mu * p).norm() / (1.0 + mu * y.powf(-1.0 - a)));
            }
        }
        out.push(check(
            format!("psi-growth alpha={a}"),
            growth > 0.0 && growth.is_finite(),
            growth,
            "min |1+mu psi(iy)|/(1+mu y^(-1-alpha))",
        ));

        // no zero of 1 + μψ near the imaginary axis or between the axis and the ray
        let theta = ContourSpec::new(alpha, 1e-12)?.theta();
        let mut pts = Vec::new();
        for &x in &log_grid(1e-4, 1.0, 13) {
            for i in -100..=100 {
                pts.push(C64::new(x, PI * i as f64 / 100.0));
            }
        }
        for i in 0..=20 {
            let phi = 0.5 * PI + (theta - 0.5 * PI) * i as f64 / 20.0;
            for &r in &log_grid(1e-4, PI / phi.sin(), 60) {
                let z = C64::from_polar(r, phi);
                pts.push(z);
                pts.push(z.conj());
            }
        }
        let psis: Vec<C64> = pts.iter().map(|&z| psi_eval(z, alpha)).collect::<Result<_>>()?;
        let mut min_abs = f64::INFINITY;
        for &mu in &mu_grid() {
            for p in &psis {
                min_abs = min_abs.min((1.0 + mu * p).norm());
            }
        }
        out.push(check(
            format!("1+mupsi alpha={a}"),
            min_abs > 0.0 && min_abs.is_finite(),
            min_abs,
            format!("min |1+mu psi(z)| over {} points x 25 mu", pts.len()),
        ));

        // |g'(y)| ≤ C μy^{-2-α}/(1+μy^{-1-α})² for g = 1/(1+μψ(iy))
        let mut c_max: f64 = 0.0;
        for &y in &ys {
            let dy = 1e-5 * y;
            let pp = psi_eval(C64::new(0.0, y + dy), alpha)?;
            let pm = psi_eval(C64::new(0.0, y - dy), alpha)?;
            for &mu in &mu_grid() {
                let d = (1.0 / (1.0 + mu * pp) - 1.0 / (1.0 + mu * pm)) / (2.0 * dy);
                let s = 1.0 + mu * y.powf(-1.0 - a);
                c_max = c_max.max(d.norm() * s * s / (mu * y.powf(-2.0 - a)));
            }
        }
        out.push(check(
            format!("g-prime alpha={a}"),
            c_max.is_finite(),
            c_max,
            "max |g'(y)|(1+mu y^(-1-alpha))^2/(mu y^(-2-alpha))",
        ));
    }
    Ok(out)
}

/// `K` values at which the scalar theorem constants are compared.
pub const SCALAR_LEVELS: [usize; 4] = [1 << 8, 1 << 10, 1 << 12, 1 << 14];

/// Largest ratio between the constants at consecutive entries of
/// [`SCALAR_LEVELS`].
fn growth(c: &[f64]) -> f64 {
    c.windows(2)
        .map(|w| {
            if w[0] > 0.0 {
                w[1] / w[0]
            } else if w[1] > 0.0 {
                f64::INFINITY
            } else {
                1.0
            }
        })
        .fold(1.0, f64::max)
}

fn ode_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let k_max = *SCALAR_LEVELS.last().unwrap();
    for &a in &ALPHAS {
        let alpha = FracOrder::new(a)?;
        let spec = ContourSpec::new(alpha, 1e-13)?;

        let zero = ScalarProblem::from_mu(alpha, 0.0, 0.01, 1.0)?;
        let hom = step_hom(&zero, 100)?;
        let forced = step_forced(&zero, 100)?;
        let mut exact = hom.y.iter().all(|&y| y == 1.0);
        exact &= forced.y.iter().enumerate().all(|(k, &y)| (y - 0.01 * k as f64).abs() <= 1e-15);
        for k in [1, 2, 10, 100] {
            exact &= contour_yk_hom(0.0, alpha, k, 1.0, &spec)? == 1.0;
            exact &= contour_yk_forced(0.0, alpha, k, 0.01, &spec)? == 0.01 * k as f64;
        }
        out.push(check(format!("mu=0 alpha={a}"), exact, 0.0, "closed forms reproduced exactly"));

        for &mu in &[1e-2, 1.0, 1e2] {
            let p = ScalarProblem::from_mu(alpha, mu, 0.01, 1.0)?;
            let hom = step_hom(&p, 100)?;
            let forced = step_forced(&p, 100)?;
            let mut dev: f64 = 0.0;
            for k in [1, 2, 10, 100] {
                dev = dev.max((contour_yk_hom(mu, alpha, k, 1.0, &spec)? - hom.y[k]).abs());
                dev = dev.max((contour_yk_forced(mu, alpha, k, 0.01, &spec)? - forced.y[k]).abs());
            }
            out.push(check(
                format!("recurrence-vs-contour alpha={a} mu={mu}"),
                dev <= 1e-9,
                dev,
                "max deviation at k in {1,2,10,100}",
            ));

            let bounded = hom.y.iter().all(|y| y.abs() <= 1.0 + 1e-15);
            out.push(check(format!("|Y_k|<=xi0 alpha={a} mu={mu}"), bounded, 0.0, "homogeneous trajectory"));

            let unit = ScalarProblem::from_mu(alpha, mu, 1.0, 1.0)?;
            let jump = verify_jump_decay(&unit, k_max)?;
            let hom_err = verify_error_decay(&unit, k_max, Mode::Hom, &spec)?;
            let forced_err = verify_error_decay(&unit, k_max, Mode::Forced, &spec)?;
            for (label, rep) in [("jump", &jump), ("hom-error", &hom_err), ("forced-error", &forced_err)] {
                let consts: Vec<f64> = SCALAR_LEVELS.iter().map(|&k| rep.sup_up_to(k)).collect();
                let g = growth(&consts);
                out.push(check(
                    format!("{label} alpha={a} mu={mu}"),
                    g < 1.1 && consts.iter().all(|c| c.is_finite()),
                    *consts.last().unwrap(),
                    format!(
                        "constants {:.4e} {:.4e} {:.4e} {:.4e}, growth {g:.4}",
                        consts[0], consts[1], consts[2], consts[3]
                    ),
                ));
            }
        }
    }
    Ok(out)
}

fn fem_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for m in [2, 8, 64, 512] {
        let grid = SpaceGrid1D::new(m)?;
        let pairs = discrete_eigenpairs(&grid)?;
        let mut dev: f64 = 0.0;
        let mut increasing = true;
        for (i, (lam, _)) in pairs.iter().enumerate() {
            let exact = eigenvalue_closed_form(&grid, i + 1);
            dev = dev.max((lam - exact).abs() / exact);
            if i > 0 {
                increasing &= *lam > pairs[i - 1].0;
            }
        }
        out.push(check(format!("eigenvalues M={m}"), dev <= 1e-10, dev, "max relative deviation from closed form"));
        out.push(check(format!("eigenvalue order M={m}"), increasing, 0.0, "strictly increasing"));
        if m <= 64 {
            let mass = assemble_mass(&grid);
            let mut orth: f64 = 0.0;
            for (i, (_, u)) in pairs.iter().enumerate() {
                let mu = mass.apply(&u.coeffs);
                for (j, (_, v)) in pairs.iter().enumerate() {
                    let ip: f64 = mu.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum();
                    orth = orth.max((ip - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
            out.push(check(format!("M-orthonormality M={m}"), orth <= 1e-12, orth, "max |phi_i^T M phi_j - delta_ij|"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dev: f64 = 0.0;
    for m in [4, 32, 256] {
        let grid = SpaceGrid1D::new(m)?;
        let v = FemFunction { coeffs: (0..grid.interior()).map(|_| rng.gen_range(-1.0..1.0)).collect() };
        let p = l2_project(&SpatialFunctionSpec::fem(&grid, &v), &grid)?;
        dev = dev.max(p.coeffs.iter().zip(&v.coeffs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    out.push(check("projection idempotence", dev <= 1e-12, dev, "max nodal deviation of P_h v from v"));
    Ok(out)
}

/// `Σ_j c_j ∫_{I_j} g(t) dt` with tanh-sinh on every slab.
fn pair_by_quadrature(c: &[f64], grid: &TimeGrid, g: impl Fn(f64) -> f64) -> f64 {
    c.iter().enumerate().map(|(j, cj)| cj * quad::tanh_sinh(&g, grid.t(j), grid.t(j + 1), 1e-15)).sum()
}

fn adjoint_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &steps in &[1usize, 4, 7, 16] {
        for &beta in &[0.3, 0.5, 0.9, 1.0] {
            let grid = TimeGrid::new(1.0 + rng.gen::<f64>(), steps)?;
            let v: Vec<f64> = (0..steps).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let w: Vec<f64> = (0..steps).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let tf = grid.final_time();
            let lhs = pair_by_quadrature(&w, &grid, |t| {
                rl_integral_pc_left(&v, &grid, beta, t.clamp(f64::MIN_POSITIVE, tf)).unwrap_or(f64::NAN)
            });
            let rhs = pair_by_quadrature(&v, &grid, |t| {
                rl_integral_pc_right(&w, &grid, beta, t.clamp(0.0, tf * (1.0 - f64::EPSILON))).unwrap_or(f64::NAN)
            });
            let dev = (lhs - rhs).abs() / lhs.abs().max(1.0);
            out.push(check(
                format!("adjoint J={steps} beta={beta}"),
                dev <= 1e-12,
                dev,
                format!("<D^-b v, w> = {lhs:.15e}"),
            ));
        }
    }
    Ok(out)
}

fn stability_suite() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let sgrid = SpaceGrid1D::dyadic(6)?;
    let tgrid = TimeGrid::dyadic(8)?;
    for id in 1..=4u8 {
        for &a in &[0.2, 0.4, 0.8] {
            let alpha = FracOrder::new(a)?;
            let (u0, f) = experiment_data(id, alpha)?;
            let bound = stability_bound(&u0, &f, tgrid.final_time())?;
            let traj = run(u0, &f, &sgrid, &tgrid, alpha, &SolverConfig::default())?;
            let max = traj.max_l2();
            out.push(check(
                format!("experiment {id} alpha={a}"),
                max <= bound + 1e-10,
                max / bound,
                format!("max_j ||U_j|| = {max:.6e}, bound {bound:.6e}"),
            ));
        }
    }
    Ok(out)
}
