//! Reference solutions: the Mittag-Leffler eigenfunction expansion of the
//! homogeneous problem and cached fine-grid runs for self-convergence.

use std::f64::consts::{PI, SQRT_2};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dg_solver::{self, run, ForcingSpec, SolverConfig, TimeGrid, Trajectory};
use crate::error::{argument, domain, io_err, Error, Result};
use crate::fem1d::{restrict_to_nodes, FemFunction, SpaceGrid1D, SpatialFunctionSpec};
use crate::frac_kernel::{gamma_fn, mittag_leffler, quad, FracOrder};

/// Dirichlet eigenfunctions `φ_n = √2 sin(nπx)` with `λ_n = n²π²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralBasis {
    pub n_max: usize,
}

impl SpectralBasis {
    pub fn lambda(n: usize) -> f64 {
        let k = n as f64 * PI;
        k * k
    }

    pub fn phi(n: usize, x: f64) -> f64 {
        SQRT_2 * (n as f64 * PI * x).sin()
    }
}

/// How the sine coefficients beyond the stored ones are bounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientTail {
    /// The expansion is finite.
    None,
    /// Coefficients of `x^p`, `-1/2 < p ≤ 0`:
    /// `|c_n| ≤ √2 (Γ(p+1)(nπ)^{-p-1} + (nπ)^{-1})`.
    Power { p: f64 },
}

/// Sine coefficients `c_1, c_2, …` together with a bound on the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    pub coeffs: Vec<f64>,
    pub tail: CoefficientTail,
}

/// Mode count for `x^{-0.49}` data, whose coefficients decay like `n^{-0.51}`.
pub const DEFAULT_MODES: usize = 4096;

/// `c_n = √2 ∫_0^1 x^p sin(nπx) dx` for `n = 1..=n_max`.
///
/// With `ω = nπ`, rotating the path of `∫_0^1 x^p e^{iωx} dx` into the upper
/// half plane gives
///
/// ```text
/// ∫_0^1 x^p e^{iωx} dx = i^{p+1} Γ(p+1) ω^{-p-1} - (i e^{iω}/ω) ∫_0^∞ (1 + iu/ω)^p e^{-u} du,
/// ```
///
/// whose last integral is smooth and exponentially decaying, so each
/// coefficient costs a handful of Gauss-Kronrod panels.
pub fn fourier_coeffs_power(p: f64, n_max: usize) -> Result<FourierData> {
    if !(p > -0.5) || !p.is_finite() {
        return Err(domain(format!("x^{p} is not square integrable on (0,1)")));
    }
    let g = gamma_fn(p + 1.0)?;
    let lead_phase = C64::from_polar(1.0, 0.5 * PI * (p + 1.0));
    let mut coeffs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let w = n as f64 * PI;
        let rest = quad::integrate_complex(|u| (C64::new(1.0, u / w)).powf(p) * (-u).exp(), 0.0, 45.0, 1e-15)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let value = lead_phase * g * w.powf(-p - 1.0) - C64::new(0.0, sign / w) * rest;
        coeffs.push(SQRT_2 * value.im);
    }
    let tail = if p <= 0.0 { CoefficientTail::Power { p } } else { CoefficientTail::Power { p: 0.0 } };
    Ok(FourierData { coeffs, tail })
}

/// `sup_{x ≥ 0} |E_{1+α,1}(-x)|(1 + x)`, sampled on a logarithmic grid and
/// padded by a safety factor.
fn decay_constant(alpha: FracOrder) -> Result<f64> {
    let beta = 1.0 + alpha.value();
    let mut best: f64 = 1.0;
    let mut x = 1e-3;
    while x < 1e5 {
        let e = mittag_leffler(beta, 1.0, C64::new(-x, 0.0))?.re;
        best = best.max(e.abs() * (1.0 + x));
        x *= 1.1;
    }
    Ok(1.5 * best)
}

/// Nodal values at the interior nodes of `sgrid` of
/// `u(t) = Σ_n c_n E_{1+α,1}(-λ_n t^{1+α}) φ_n`.
///
/// Fails with a truncation error if the bound on the discarded modes exceeds
/// `tol`.
pub fn exact_hom_solution(
    data: &FourierData,
    alpha: FracOrder,
    t: f64,
    sgrid: &SpaceGrid1D,
    tol: f64,
) -> Result<FemFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain(format!("evaluation time must be positive, got {t}")));
    }
    let a = alpha.value();
    let s = t.powf(1.0 + a);
    let n_max = data.coeffs.len();
    let bound = match data.tail {
        CoefficientTail::None => 0.0,
        CoefficientTail::Power { p } => {
            // Σ_{n>N} √2|c_n| C/(1+n²π² s) ≤ 2C Σ_{n>N} (Γ(p+1)(nπ)^{-p-1} + (nπ)^{-1}) / (n²π² s)
            let c = decay_constant(alpha)?;
            let nf = n_max.max(1) as f64;
            let g = gamma_fn(p + 1.0)?;
            let first = g * PI.powf(-p - 1.0) * nf.powf(-p - 2.0) / (p + 2.0);
            let second = nf.powf(-2.0) / (2.0 * PI);
            2.0 * c * (first + second) / (PI * PI * s)
        }
    };
    if bound > tol {
        return Err(Error::Truncation { requested: tol, achieved: bound });
    }
    let beta = 1.0 + a;
    let mut amps = Vec::with_capacity(n_max);
    for (i, c) in data.coeffs.iter().enumerate() {
        let n = i + 1;
        let e = mittag_leffler(beta, 1.0, C64::new(-SpectralBasis::lambda(n) * s, 0.0))?.re;
        amps.push(c * e);
    }
    let coeffs = (1..sgrid.intervals())
        .map(|i| {
            let x = sgrid.node(i);
            amps.iter().enumerate().map(|(k, amp)| amp * SpectralBasis::phi(k + 1, x)).sum()
        })
        .collect();
    Ok(FemFunction { coeffs })
}

/// Initial value and source of the four convergence experiments.
pub fn experiment_data(id: u8, alpha: FracOrder) -> Result<(SpatialFunctionSpec, ForcingSpec)> {
    let a = alpha.value();
    Ok(match id {
        1 => (SpatialFunctionSpec::power(-0.49), ForcingSpec::Zero),
        2 => (SpatialFunctionSpec::Zero, ForcingSpec::Constant { x: SpatialFunctionSpec::power(-0.49) }),
        3 => (
            SpatialFunctionSpec::Zero,
            ForcingSpec::Separable { x: SpatialFunctionSpec::power(a / (a + 1.0) - 0.49), q: -0.49 },
        ),
        4 => (SpatialFunctionSpec::Zero, ForcingSpec::Separable { x: SpatialFunctionSpec::power(-0.49), q: a + 0.01 }),
        _ => return Err(argument(format!("experiment id must be 1..=4, got {id}"))),
    })
}

/// Cache entry description stored next to each trajectory file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: u8,
    pub alpha: f64,
    pub m: u32,
    pub n: u32,
    pub sha256: String,
}

fn cache_stem(id: u8, alpha: FracOrder, m: u32, n: u32) -> String {
    format!("exp{id}_alpha{}_m{m}_n{n}", alpha.value())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(dir: &Path, target: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(target))?;
    tmp.as_file().sync_all().map_err(io_err(target))?;
    tmp.persist(target).map_err(|e| Error::Io { path: target.to_path_buf(), source: e.error })?;
    Ok(())
}

fn try_load(bin: &Path, manifest: &Path, expect: &Manifest) -> Option<Trajectory> {
    let text = fs::read_to_string(manifest).ok()?;
    let found: Manifest = serde_json::from_str(&text).ok()?;
    if found.experiment != expect.experiment
        || found.alpha != expect.alpha
        || found.m != expect.m
        || found.n != expect.n
    {
        return None;
    }
    let bytes = fs::read(bin).ok()?;
    if sha256_hex(&bytes) != found.sha256 {
        return None;
    }
    dg_solver::read_dump(bin).ok()
}

/// Where the fine-grid references live, if anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cache {
    Disabled,
    Dir(PathBuf),
}

impl Cache {
    /// `FRACWAVE_CACHE_DIR` if set, otherwise no caching.
    pub fn from_env() -> Self {
        match std::env::var_os("FRACWAVE_CACHE_DIR") {
            Some(d) if !d.is_empty() => Cache::Dir(PathBuf::from(d)),
            _ => Cache::Disabled,
        }
    }
}

/// The run with `h = 2^{-ref_m}`, `τ = 2^{-ref_n}` for experiment `id`, read
/// from or written to `cache`. Cache files are a trajectory dump plus a JSON
/// manifest holding its SHA-256; a mismatching entry is recomputed.
pub fn fine_grid_reference(
    id: u8,
    alpha: FracOrder,
    ref_m: u32,
    ref_n: u32,
    cache: &Cache,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let (u0, f) = experiment_data(id, alpha)?;
    let sgrid = SpaceGrid1D::dyadic(ref_m)?;
    let tgrid = TimeGrid::dyadic(ref_n)?;
    let Cache::Dir(dir) = cache else {
        return run(u0, &f, &sgrid, &tgrid, alpha, config);
    };
    let stem = cache_stem(id, alpha, ref_m, ref_n);
    let bin = dir.join(format!("{stem}.bin"));
    let manifest = dir.join(format!("{stem}.json"));
    let mut expect = Manifest { experiment: id, alpha: alpha.value(), m: ref_m, n: ref_n, sha256: String::new() };
    if let Some(t) = try_load(&bin, &manifest, &expect) {
        return Ok(t);
    }
    let traj = run(u0, &f, &sgrid, &tgrid, alpha, &SolverConfig { store_full_history: true, ..*config })?;
    fs::create_dir_all(dir).map_err(io_err(dir.as_path()))?;
    let mut bytes = Vec::new();
    dg_solver::write_dump_to(&traj, &mut bytes).map_err(io_err(bin.as_path()))?;
    expect.sha256 = sha256_hex(&bytes);
    write_atomic(dir, &bin, &bytes)?;
    let json = serde_json::to_vec_pretty(&expect)
        .map_err(|e| Error::Format { path: manifest.clone(), reason: e.to_string() })?;
    write_atomic(dir, &manifest, &json)?;
    Ok(traj)
}

/// `fine` sampled at the nodes of `space` and at the slab endpoints of
/// `time` (left limits). Both grids must be nested in the fine ones.
pub fn restrict_trajectory(fine: &Trajectory, space: &SpaceGrid1D, time: &TimeGrid) -> Result<Trajectory> {
    let ratio = time_ratio(&fine.time, time)?;
    let u0h = FemFunction { coeffs: restrict_to_nodes(fine.slab(0), &fine.space, space)? };
    let mut values = Vec::with_capacity(space.interior() * time.steps());
    for j in 1..=time.steps() {
        values.extend(restrict_to_nodes(fine.slab(j * ratio), &fine.space, space)?);
    }
    Trajectory::new(fine.alpha, *space, *time, u0h, values)
}

/// Number of fine slabs per coarse slab.
pub fn time_ratio(fine: &TimeGrid, coarse: &TimeGrid) -> Result<usize> {
    if fine.final_time() != coarse.final_time() || fine.steps() % coarse.steps() != 0 {
        return Err(argument(format!(
            "time grid with {} steps is not nested in one with {}",
            coarse.steps(),
            fine.steps()
        )));
    }
    Ok(fine.steps() / coarse.steps())
}
