//! Piecewise-constant-in-time discontinuous Galerkin scheme with P1 finite
//! elements in space.
//!
//! Testing the scheme with `V = φ_i` on the slab `I_{k+1}` and zero elsewhere
//! leaves one linear system per slab. The jump term contributes
//! `M(U_{k+1} - U_k)`. For a slab-wise constant `U`, the integral over
//! `I_{k+1}` of `D^{-α}` applied to the piece on `I_j` equals
//! `τ^{1+α}(b_{k-j+2} - 2b_{k-j+1} + b_{k-j})` for `j ≤ k` and `τ^{1+α} b₁` for
//! `j = k+1`, hence
//!
//! ```text
//! (M + τ^{1+α} b₁ A) U_{k+1} = M U_k - τ^{1+α} A H_k + F_{k+1},
//! H_k = Σ_{j=1}^{k} w_{k+1-j} U_j,     F_{k+1,i} = ∫_{I_{k+1}} ⟨f(t), φ_i⟩ dt,
//! ```
//!
//! with `U_0 = P_h u_0`. Projected onto a discrete eigenvector this is the
//! scalar recurrence of [`crate::scalar_ode`], which is how the solver is
//! tested.

mod dump;
mod history;

pub use dump::{read_dump, write_dump, write_to as write_dump_to};
pub use history::{history_sum_fft, history_sum_naive, BlockState};

use crate::error::{argument, domain, Error, Result};
use crate::fem1d::{
    assemble_mass, assemble_stiffness, l2_project, load_vector, FemFunction, SpaceGrid1D, SpatialFunctionSpec,
};
use crate::frac_kernel::{conv_weights, FracOrder};

/// Uniform partition of `[0, T]` into `J` slabs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(domain(format!("final time must be positive, got {t_final}")));
        }
        if steps == 0 {
            return Err(argument("a time grid needs at least one step"));
        }
        Ok(Self { t_final, steps })
    }

    /// `T = 1`, `τ = 2^{-level}`.
    pub fn dyadic(level: u32) -> Result<Self> {
        if level > 40 {
            return Err(argument(format!("temporal level {level} is too large")));
        }
        Self::new(1.0, 1usize << level)
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn final_time(&self) -> f64 {
        self.t_final
    }

    pub fn tau(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    /// `t_j = jτ` (exactly `T` at `j = J`).
    pub fn t(&self, j: usize) -> f64 {
        if j == self.steps {
            self.t_final
        } else {
            j as f64 * self.tau()
        }
    }
}

/// Source term of the supported forms.
#[derive(Debug, Clone)]
pub enum ForcingSpec {
    Zero,
    /// `f(x,t) = X(x)`.
    Constant {
        x: SpatialFunctionSpec,
    },
    /// `f(x,t) = X(x) t^q`, `q > -1`.
    Separable {
        x: SpatialFunctionSpec,
        q: f64,
    },
}

impl ForcingSpec {
    fn spatial(&self) -> Option<&SpatialFunctionSpec> {
        match self {
            ForcingSpec::Zero => None,
            ForcingSpec::Constant { x } | ForcingSpec::Separable { x, .. } => Some(x),
        }
    }

    fn validate(&self) -> Result<()> {
        if let ForcingSpec::Separable { q, .. } = self {
            if !(*q > -1.0) || !q.is_finite() {
                return Err(domain(format!("time exponent must exceed -1, got {q}")));
            }
        }
        Ok(())
    }

    /// `∫_{t_{k-1}}^{t_k}` of the time factor.
    pub fn time_factor(&self, grid: &TimeGrid, k: usize) -> Result<f64> {
        self.validate()?;
        if k == 0 || k > grid.steps() {
            return Err(argument(format!("slab index {k} outside 1..={}", grid.steps())));
        }
        Ok(match self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Constant { .. } => grid.t(k) - grid.t(k - 1),
            ForcingSpec::Separable { q, .. } => {
                let p = q + 1.0;
                if k == 1 {
                    grid.t(1).powf(p) / p
                } else {
                    // t_k^p - t_{k-1}^p = t_{k-1}^p·expm1(p·ln(t_k/t_{k-1}))
                    let a = grid.t(k - 1);
                    let ratio = (grid.t(k) - a) / a;
                    a.powf(p) * (p * ratio.ln_1p()).exp_m1() / p
                }
            }
        })
    }

    /// `‖f‖_{L¹(0,T; L²)}`.
    pub fn l1_l2_norm(&self, t_final: f64) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Constant { x } => x.l2_norm()? * t_final,
            ForcingSpec::Separable { x, q } => x.l2_norm()? * t_final.powf(q + 1.0) / (q + 1.0),
        })
    }
}

/// Load vector `F_k` of slab `k`.
pub fn rhs_load(f: &ForcingSpec, sgrid: &SpaceGrid1D, tgrid: &TimeGrid, k: usize) -> Result<Vec<f64>> {
    let factor = f.time_factor(tgrid, k)?;
    match f.spatial() {
        None => Ok(vec![0.0; sgrid.interior()]),
        Some(x) => Ok(load_vector(x, sgrid)?.into_iter().map(|v| v * factor).collect()),
    }
}

/// How the memory term is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryMode {
    Naive,
    FftBlocked,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub history_mode: HistoryMode,
    /// Keep every slab in the returned trajectory (otherwise only `U_0` and
    /// `U_J`).
    pub store_full_history: bool,
    /// Bound on the relative residual of every per-slab solve.
    pub linear_solve_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { history_mode: HistoryMode::FftBlocked, store_full_history: true, linear_solve_tol: 1e-10 }
    }
}

/// Initial value of a run.
#[derive(Debug, Clone)]
pub enum InitialValue {
    /// `U_0 = P_h u_0`.
    Function(SpatialFunctionSpec),
    /// `U_0` given directly.
    Discrete(FemFunction),
}

impl From<SpatialFunctionSpec> for InitialValue {
    fn from(s: SpatialFunctionSpec) -> Self {
        InitialValue::Function(s)
    }
}

/// Slab values of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub alpha: FracOrder,
    pub space: SpaceGrid1D,
    pub time: TimeGrid,
    /// `U_0`.
    pub u0h: FemFunction,
    /// Row-major `U_1..U_J` (or only `U_J` without full history).
    values: Vec<f64>,
    full: bool,
    /// `‖U_j‖_{L²}`, `j = 0..=J`.
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn new(
        alpha: FracOrder,
        space: SpaceGrid1D,
        time: TimeGrid,
        u0h: FemFunction,
        values: Vec<f64>,
    ) -> Result<Self> {
        let n = space.interior();
        if u0h.len() != n || values.len() != n * time.steps() {
            return Err(argument("trajectory data does not match its grids"));
        }
        let mass = assemble_mass(&space);
        let mut norms = vec![mass.quad_form(&u0h.coeffs).max(0.0).sqrt()];
        norms.extend(values.chunks(n).map(|row| mass.quad_form(row).max(0.0).sqrt()));
        Ok(Self { alpha, space, time, u0h, values, full: true, norms })
    }

    pub fn has_full_history(&self) -> bool {
        self.full
    }

    /// `U_j` for `j = 0..=J`; the value on the slab `(t_{j-1}, t_j]` for
    /// `j ≥ 1`, i.e. the left limit at `t_j`.
    ///
    /// Panics if the slab was not stored.
    pub fn slab(&self, j: usize) -> &[f64] {
        let n = self.space.interior();
        if j == 0 {
            return &self.u0h.coeffs;
        }
        assert!(j <= self.time.steps(), "slab {j} beyond J = {}", self.time.steps());
        if self.full {
            &self.values[(j - 1) * n..j * n]
        } else {
            assert!(j == self.time.steps(), "slab {j} was not stored");
            &self.values[..n]
        }
    }

    /// `U_1..U_J` as one row-major buffer (full history only).
    pub fn slabs_flat(&self) -> &[f64] {
        assert!(self.full, "trajectory was run without full history");
        &self.values
    }

    /// `max_j ‖U_j‖_{L²}` over `j = 0..=J`.
    pub fn max_l2(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }
}

/// `√2‖u_0‖ + 2‖f‖_{L¹(L²)}`, the a-priori bound on `max_j ‖U_j‖`.
pub fn stability_bound(u0: &SpatialFunctionSpec, f: &ForcingSpec, t_final: f64) -> Result<f64> {
    Ok(std::f64::consts::SQRT_2 * u0.l2_norm()? + 2.0 * f.l1_l2_norm(t_final)?)
}

/// Runs the scheme.
pub fn run(
    u0: impl Into<InitialValue>,
    f: &ForcingSpec,
    sgrid: &SpaceGrid1D,
    tgrid: &TimeGrid,
    alpha: FracOrder,
    config: &SolverConfig,
) -> Result<Trajectory> {
    f.validate()?;
    let n = sgrid.interior();
    let jmax = tgrid.steps();
    let u0h = match u0.into() {
        InitialValue::Function(spec) => l2_project(&spec, sgrid)?,
        InitialValue::Discrete(v) => {
            if v.len() != n {
                return Err(argument(format!("initial vector has {} entries, grid needs {n}", v.len())));
            }
            v
        }
    };
    let mass = assemble_mass(sgrid);
    let stiff = assemble_stiffness(sgrid);
    let weights = conv_weights(alpha, 2 * jmax + 2)?;
    let tau = tgrid.tau();
    let c = tau.powf(1.0 + alpha.value());
    let system = mass.combine(1.0, &stiff, c * weights.b1())?;
    let factor = system.factor_spd()?;

    let load = match f.spatial() {
        Some(x) => Some(load_vector(x, sgrid)?),
        None => None,
    };

    let mut slabs = vec![0.0; n * jmax];
    let mut blocks = match config.history_mode {
        HistoryMode::FftBlocked => Some(BlockState::new(n, &weights)),
        HistoryMode::Naive => None,
    };
    let mut rhs = vec![0.0; n];
    let mut ah = vec![0.0; n];
    let mut residual = vec![0.0; n];
    for k in 0..jmax {
        let prev: &[f64] = if k == 0 { &u0h.coeffs } else { &slabs[(k - 1) * n..k * n] };
        mass.apply_into(prev, &mut rhs);
        if k >= 1 {
            let h = match blocks.as_mut() {
                Some(state) => history_sum_fft(&slabs[..k * n], state, k)?,
                None => history_sum_naive(&slabs[..k * n], n, &weights, k)?,
            };
            stiff.apply_into(&h, &mut ah);
            for (r, a) in rhs.iter_mut().zip(&ah) {
                *r -= c * a;
            }
        }
        if let Some(load) = &load {
            let tf = f.time_factor(tgrid, k + 1)?;
            for (r, l) in rhs.iter_mut().zip(load) {
                *r += tf * l;
            }
        }
        let next = &mut slabs[k * n..(k + 1) * n];
        next.copy_from_slice(&rhs);
        factor.solve_in_place(next);
        system.apply_into(next, &mut residual);
        let res = residual.iter().zip(&rhs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(res <= config.linear_solve_tol * scale.max(f64::MIN_POSITIVE)) && res > 0.0 {
            return Err(Error::Numeric(format!("slab {} solve left relative residual {:e}", k + 1, res / scale)));
        }
    }
    let mut traj = Trajectory::new(alpha, *sgrid, *tgrid, u0h, slabs)?;
    if !config.store_full_history {
        let last = traj.slab(jmax).to_vec();
        traj.values = last;
        traj.full = false;
    }
    Ok(traj)
}
