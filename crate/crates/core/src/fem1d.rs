//! Continuous piecewise-linear finite elements on a uniform grid of (0,1)
//! with homogeneous Dirichlet conditions.
//!
//! Unknowns are the values at the interior nodes `x_i = i h`, `i = 1..M-1`.

use std::fmt;
use std::sync::Arc;

use crate::error::{argument, domain, Error, Result};
use crate::frac_kernel::quad::gauss_legendre;

/// Uniform grid of (0,1) with `M` sub-intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceGrid1D {
    m: usize,
}

impl SpaceGrid1D {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(argument(format!("a spatial grid needs M >= 2 sub-intervals, got {m}")));
        }
        Ok(Self { m })
    }

    /// Grid with `h = 2^{-level}`.
    pub fn dyadic(level: u32) -> Result<Self> {
        if level == 0 || level > 30 {
            return Err(argument(format!("spatial level must lie in 1..=30, got {level}")));
        }
        Self::new(1 << level)
    }

    /// Number of sub-intervals `M`.
    pub fn intervals(&self) -> usize {
        self.m
    }

    /// Number of interior nodes `N = M - 1`.
    pub fn interior(&self) -> usize {
        self.m - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Node `x_i`, `i = 0..=M`.
    pub fn node(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiagMatrix {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl TriDiagMatrix {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(argument(format!(
                "tridiagonal matrix needs n diagonal and n-1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &TriDiagMatrix, b: f64) -> Result<TriDiagMatrix> {
        if self.size() != other.size() {
            return Err(argument("tridiagonal sizes differ"));
        }
        Ok(TriDiagMatrix {
            diag: self.diag.iter().zip(&other.diag).map(|(x, y)| a * x + b * y).collect(),
            off: self.off.iter().zip(&other.off).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    /// `out = self · x`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.size();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            out[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size()];
        self.apply_into(x, &mut out);
        out
    }

    /// `xᵀ T x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        let tx = self.apply(x);
        x.iter().zip(&tx).map(|(a, b)| a * b).sum()
    }

    /// `LDLᵀ` factorization; fails unless every pivot is positive.
    pub fn factor_spd(&self) -> Result<SpdFactor> {
        let n = self.size();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0];
        for i in 0..n {
            if i > 0 {
                l[i - 1] = self.off[i - 1] / d[i - 1];
                d[i] = self.diag[i] - l[i - 1] * self.off[i - 1];
            }
            if !(d[i] > 0.0) || !d[i].is_finite() {
                return Err(Error::Numeric(format!("matrix is not positive definite (pivot {} = {})", i, d[i])));
            }
        }
        Ok(SpdFactor { l, d })
    }

    /// Number of negative pivots of `self - sigma·other` (Sylvester inertia);
    /// for SPD `other` this counts generalized eigenvalues below `sigma`.
    fn count_below(&self, other: &TriDiagMatrix, sigma: f64) -> usize {
        let n = self.size();
        let mut count = 0;
        let mut d = 0.0;
        for i in 0..n {
            let diag = self.diag[i] - sigma * other.diag[i];
            d = if i == 0 {
                diag
            } else {
                let off = self.off[i - 1] - sigma * other.off[i - 1];
                diag - off * off / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * (diag.abs() + 1e-300);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }
}

/// Reusable `LDLᵀ` factors of an SPD tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    l: Vec<f64>,
    d: Vec<f64>,
}

impl SpdFactor {
    pub fn size(&self) -> usize {
        self.d.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        assert_eq!(x.len(), n);
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Solves `T x = rhs` for SPD `T`.
pub fn solve_spd_tridiag(t: &TriDiagMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != t.size() {
        return Err(argument(format!("right-hand side has {} entries, matrix {}", rhs.len(), t.size())));
    }
    Ok(t.factor_spd()?.solve(rhs))
}

/// Gaussian elimination with partial pivoting for a general tridiagonal
/// system (`sub`, `diag`, `sup`); used on the shifted, indefinite matrices of
/// inverse iteration.
fn solve_tridiag_pivoting(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    // rows carry up to two super-diagonals after interchanges
    let mut a = diag.to_vec();
    let mut b = sup.to_vec();
    b.push(0.0);
    let mut c = vec![0.0; n];
    let mut lower = sub.to_vec();
    for i in 0..n.saturating_sub(1) {
        if lower[i].abs() > a[i].abs() {
            // swap rows i and i+1
            let (ai, bi, ci) = (a[i], b[i], c[i]);
            a[i] = lower[i];
            b[i] = a[i + 1];
            c[i] = b[i + 1];
            lower[i] = ai;
            a[i + 1] = bi;
            b[i + 1] = ci;
            rhs.swap(i, i + 1);
        }
        if a[i] == 0.0 {
            a[i] = f64::EPSILON;
        }
        let f = lower[i] / a[i];
        a[i + 1] -= f * b[i];
        b[i + 1] -= f * c[i];
        rhs[i + 1] -= f * rhs[i];
    }
    if a[n - 1] == 0.0 {
        a[n - 1] = f64::EPSILON;
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= b[i] * rhs[i + 1];
        }
        if i + 2 < n {
            s -= c[i] * rhs[i + 2];
        }
        rhs[i] = s / a[i];
    }
}

/// Coefficient vector of a finite element function (interior nodal values).
#[derive(Debug, Clone, PartialEq)]
pub struct FemFunction {
    pub coeffs: Vec<f64>,
}

impl FemFunction {
    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![0.0; n] }
    }

    /// Nodal interpolant of `f` (boundary values ignored).
    pub fn interpolate(grid: &SpaceGrid1D, f: impl Fn(f64) -> f64) -> Self {
        Self { coeffs: (1..grid.intervals()).map(|i| f(grid.node(i))).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// A function of `x ∈ (0,1)` used as initial value or spatial factor of a
/// forcing.
#[derive(Clone)]
pub enum SpatialFunctionSpec {
    Zero,
    /// `x^p`, square integrable for `p > -1/2`.
    Power {
        p: f64,
    },
    /// A bounded function given pointwise.
    Smooth {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        label: String,
    },
    /// A member of the finite element space of the grid with `m` intervals.
    Fem {
        m: usize,
        coeffs: Arc<Vec<f64>>,
    },
}

impl fmt::Debug for SpatialFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SpatialFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpatialFunctionSpec::Zero => write!(f, "0"),
            SpatialFunctionSpec::Power { p } => write!(f, "x^{p}"),
            SpatialFunctionSpec::Smooth { label, .. } => write!(f, "{label}"),
            SpatialFunctionSpec::Fem { m, .. } => write!(f, "fem(M={m})"),
        }
    }
}

impl SpatialFunctionSpec {
    pub fn power(p: f64) -> Self {
        SpatialFunctionSpec::Power { p }
    }

    pub fn smooth(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SpatialFunctionSpec::Smooth { f: Arc::new(f), label: label.into() }
    }

    /// `√2 sin(nπx)`, the n-th Dirichlet eigenfunction.
    pub fn sine_mode(n: usize) -> Self {
        let k = n as f64 * std::f64::consts::PI;
        Self::smooth(format!("sqrt2*sin({n}*pi*x)"), move |x| std::f64::consts::SQRT_2 * (k * x).sin())
    }

    pub fn fem(grid: &SpaceGrid1D, v: &FemFunction) -> Self {
        SpatialFunctionSpec::Fem { m: grid.intervals(), coeffs: Arc::new(v.coeffs.clone()) }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SpatialFunctionSpec::Zero)
    }

    fn validate(&self) -> Result<()> {
        match self {
            SpatialFunctionSpec::Power { p } if !(*p > -0.5) || !p.is_finite() => {
                Err(domain(format!("x^{p} is not square integrable on (0,1)")))
            }
            SpatialFunctionSpec::Fem { m, coeffs } if *m < 2 || coeffs.len() + 1 != *m => {
                Err(argument(format!("finite element data with {} values does not fit M = {m}", coeffs.len())))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SpatialFunctionSpec::Zero => 0.0,
            SpatialFunctionSpec::Power { p } => x.powf(*p),
            SpatialFunctionSpec::Smooth { f, .. } => f(x),
            SpatialFunctionSpec::Fem { m, coeffs } => {
                let pos = (x * *m as f64).clamp(0.0, *m as f64);
                let i = (pos.floor() as usize).min(m - 1);
                let r = pos - i as f64;
                let value = |j: usize| if j == 0 || j == *m { 0.0 } else { coeffs[j - 1] };
                (1.0 - r) * value(i) + r * value(i + 1)
            }
        }
    }

    /// `‖f‖_{L²(0,1)}`; closed form for powers, composite Gauss otherwise.
    pub fn l2_norm(&self) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            SpatialFunctionSpec::Zero => 0.0,
            SpatialFunctionSpec::Power { p } => 1.0 / (2.0 * p + 1.0).sqrt(),
            SpatialFunctionSpec::Smooth { f, .. } => {
                let g = gauss_legendre(10);
                let panels = 256;
                let h = 1.0 / panels as f64;
                let mut s = 0.0;
                for e in 0..panels {
                    let c = (e as f64 + 0.5) * h;
                    for (x, w) in g.x.iter().zip(&g.w) {
                        let v = f(c + 0.5 * h * x);
                        s += 0.5 * h * w * v * v;
                    }
                }
                s.sqrt()
            }
            SpatialFunctionSpec::Fem { m, coeffs } => {
                let grid = SpaceGrid1D::new(*m)?;
                assemble_mass(&grid).quad_form(coeffs).max(0.0).sqrt()
            }
        })
    }
}

/// Consistent mass matrix, rows `(h/6)[1, 4, 1]`.
pub fn assemble_mass(grid: &SpaceGrid1D) -> TriDiagMatrix {
    let n = grid.interior();
    let h = grid.h();
    TriDiagMatrix { diag: vec![4.0 * h / 6.0; n], off: vec![h / 6.0; n - 1] }
}

/// Stiffness matrix, rows `(1/h)[-1, 2, -1]`.
pub fn assemble_stiffness(grid: &SpaceGrid1D) -> TriDiagMatrix {
    let n = grid.interior();
    let h = grid.h();
    TriDiagMatrix { diag: vec![2.0 / h; n], off: vec![-1.0 / h; n - 1] }
}

/// `∫_a^{a+h} x^p dx` and `∫_a^{a+h} x^p (x-a)/h dx`.
///
/// For elements away from the origin both are expanded in `δ = h/a`, which
/// avoids the cancellation of the closed-form differences.
fn power_moments(p: f64, a: f64, h: f64) -> (f64, f64) {
    let b = a + h;
    if a <= 4.0 * h {
        let i0 = (b.powf(p + 1.0) - a.powf(p + 1.0)) / (p + 1.0);
        let i1 = (b.powf(p + 2.0) - a.powf(p + 2.0)) / (p + 2.0);
        return (i0, (i1 - a * i0) / h);
    }
    // ∫_0^δ (1+u)^p du and ∫_0^δ (1+u)^p u du as binomial series
    let delta = h / a;
    let mut coef = 1.0;
    let mut dpow = delta;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for n in 0..200 {
        let nf = n as f64;
        let t0 = coef * dpow / (nf + 1.0);
        let t1 = coef * dpow * delta / (nf + 2.0);
        s0 += t0;
        s1 += t1;
        if t0.abs() < 1e-18 * s0.abs() {
            break;
        }
        coef *= (p - nf) / (nf + 1.0);
        dpow *= delta;
    }
    let ap = a.powf(p + 1.0);
    (ap * s0, ap * a * s1 / h)
}

/// Load vector `(∫ f φ_i)_i`.
pub fn load_vector(spec: &SpatialFunctionSpec, grid: &SpaceGrid1D) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = grid.interior();
    let m = grid.intervals();
    let h = grid.h();
    let mut load = vec![0.0; n];
    match spec {
        SpatialFunctionSpec::Zero => {}
        SpatialFunctionSpec::Power { p } => {
            // element e = [x_e, x_{e+1}] feeds node e through its falling
            // half and node e+1 through its rising half
            for e in 0..m {
                let (i0, rising) = power_moments(*p, grid.node(e), h);
                if e >= 1 {
                    load[e - 1] += i0 - rising;
                }
                if e + 1 <= n {
                    load[e] += rising;
                }
            }
        }
        SpatialFunctionSpec::Smooth { f, .. } => {
            let g = gauss_legendre(5);
            for e in 0..m {
                let a = grid.node(e);
                for (x, w) in g.x.iter().zip(&g.w) {
                    let s = 0.5 * (1.0 + x);
                    let v = 0.5 * h * w * f(a + s * h);
                    if e >= 1 {
                        load[e - 1] += v * (1.0 - s);
                    }
                    if e + 1 <= n {
                        load[e] += v * s;
                    }
                }
            }
        }
        SpatialFunctionSpec::Fem { m: fm, coeffs } => {
            if *fm != m {
                return Err(argument(format!("finite element data lives on M = {fm}, grid has M = {m}")));
            }
            load = assemble_mass(grid).apply(coeffs);
        }
    }
    Ok(load)
}

/// L² projection onto the finite element space.
pub fn l2_project(spec: &SpatialFunctionSpec, grid: &SpaceGrid1D) -> Result<FemFunction> {
    let load = load_vector(spec, grid)?;
    if spec.is_zero() {
        return Ok(FemFunction::zeros(grid.interior()));
    }
    Ok(FemFunction { coeffs: solve_spd_tridiag(&assemble_mass(grid), &load)? })
}

/// `sqrt(vᵀ M v)`.
pub fn l2_norm(v: &FemFunction, mass: &TriDiagMatrix) -> Result<f64> {
    if v.len() != mass.size() {
        return Err(argument(format!("vector has {} entries, matrix {}", v.len(), mass.size())));
    }
    Ok(mass.quad_form(&v.coeffs).max(0.0).sqrt())
}

/// Closed form `λ_{n,h} = (6/h²)(1 - cos nπh)/(2 + cos nπh)` of the uniform
/// grid.
pub fn eigenvalue_closed_form(grid: &SpaceGrid1D, n: usize) -> f64 {
    let h = grid.h();
    let c = (n as f64 * std::f64::consts::PI * h).cos();
    // 1 - cos x = 2 sin²(x/2)
    let s = (0.5 * n as f64 * std::f64::consts::PI * h).sin();
    6.0 / (h * h) * 2.0 * s * s / (2.0 + c)
}

/// Generalized eigenpairs `A φ = λ M φ`, ascending, with `M`-orthonormal
/// eigenvectors whose first coefficient is positive.
///
/// Eigenvalues by bisection on the inertia of `A - σM`; eigenvectors by
/// inverse iteration, re-orthogonalised against close neighbours.
pub fn discrete_eigenpairs(grid: &SpaceGrid1D) -> Result<Vec<(f64, FemFunction)>> {
    let mass = assemble_mass(grid);
    let stiff = assemble_stiffness(grid);
    mass.factor_spd()?;
    let n = grid.interior();
    // Gershgorin: λ ≤ ‖A‖_∞ / λ_min(M)
    let row_a = (0..n)
        .map(|i| {
            stiff.diag[i].abs()
                + if i > 0 { stiff.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { stiff.off[i].abs() } else { 0.0 }
        })
        .fold(0.0, f64::max);
    let min_m = (0..n)
        .map(|i| {
            mass.diag[i]
                - if i > 0 { mass.off[i - 1].abs() } else { 0.0 }
                - if i + 1 < n { mass.off[i].abs() } else { 0.0 }
        })
        .fold(f64::INFINITY, f64::min);
    if !(min_m > 0.0) {
        return Err(Error::Numeric("mass matrix is not diagonally dominant".into()));
    }
    let upper = 1.01 * row_a / min_m;

    let mut out: Vec<(f64, FemFunction)> = Vec::with_capacity(n);
    for idx in 0..n {
        let (mut lo, mut hi) = (0.0, upper);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if stiff.count_below(&mass, mid) > idx {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lam = 0.5 * (lo + hi);
        let vec = inverse_iteration(&stiff, &mass, lam, &out)?;
        out.push((lam, vec));
    }
    Ok(out)
}

fn inverse_iteration(
    stiff: &TriDiagMatrix,
    mass: &TriDiagMatrix,
    lam: f64,
    found: &[(f64, FemFunction)],
) -> Result<FemFunction> {
    let n = stiff.size();
    let shifted = stiff.combine(1.0, mass, -lam)?;
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * ((i as f64) * 1.618).sin()).collect();
    let neighbours: Vec<&FemFunction> = found
        .iter()
        .rev()
        .take_while(|(l, _)| (lam - l).abs() <= 1e-3 * lam.abs().max(1e-300))
        .map(|(_, v)| v)
        .collect();
    for _ in 0..4 {
        let mut rhs = mass.apply(&x);
        solve_tridiag_pivoting(&shifted.off, &shifted.diag, &shifted.off, &mut rhs);
        x = rhs;
        for v in &neighbours {
            let mv = mass.apply(&v.coeffs);
            let proj: f64 = x.iter().zip(&mv).map(|(a, b)| a * b).sum();
            for (xi, vi) in x.iter_mut().zip(&v.coeffs) {
                *xi -= proj * vi;
            }
        }
        let nrm = mass.quad_form(&x).sqrt();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::Numeric(format!("inverse iteration broke down at lambda = {lam}")));
        }
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    if x[0] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok(FemFunction { coeffs: x })
}

/// Nodal values of a coarse function at the nodes of a nested finer grid
/// (linear interpolation, which is exact for P1 functions).
pub fn prolongate(coarse: &[f64], coarse_grid: &SpaceGrid1D, fine_grid: &SpaceGrid1D) -> Result<Vec<f64>> {
    let ratio = nesting_ratio(coarse_grid, fine_grid)?;
    if coarse.len() != coarse_grid.interior() {
        return Err(argument("coarse vector does not match its grid"));
    }
    let value = |i: usize| if i == 0 || i == coarse_grid.intervals() { 0.0 } else { coarse[i - 1] };
    Ok((1..fine_grid.intervals())
        .map(|j| {
            let i = j / ratio;
            let r = (j % ratio) as f64 / ratio as f64;
            if r == 0.0 {
                value(i)
            } else {
                (1.0 - r) * value(i) + r * value(i + 1)
            }
        })
        .collect())
}

/// Values of a fine function at the nodes of a nested coarser grid.
pub fn restrict_to_nodes(fine: &[f64], fine_grid: &SpaceGrid1D, coarse_grid: &SpaceGrid1D) -> Result<Vec<f64>> {
    let ratio = nesting_ratio(coarse_grid, fine_grid)?;
    if fine.len() != fine_grid.interior() {
        return Err(argument("fine vector does not match its grid"));
    }
    Ok((1..coarse_grid.intervals()).map(|i| fine[i * ratio - 1]).collect())
}

fn nesting_ratio(coarse: &SpaceGrid1D, fine: &SpaceGrid1D) -> Result<usize> {
    if fine.intervals() % coarse.intervals() != 0 {
        return Err(argument(format!(
            "grid with {} intervals is not nested in grid with {}",
            coarse.intervals(),
            fine.intervals()
        )));
    }
    Ok(fine.intervals() / coarse.intervals())
}
