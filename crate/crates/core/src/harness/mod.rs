//! Error norms, convergence tables and the experiment driver.
//!
//! Errors are measured against a fine-grid reference. In time, the coarse
//! trajectory is compared with the reference on every fine slab, which gives
//! the exact `L∞(0,T;L²)` norm of the difference of the two piecewise-constant
//! functions; the weighted norms `‖·‖_{β,n}` only look at the coarse slab
//! endpoints (left limits). In space the coarse P1 function is embedded into
//! the fine grid and the difference is measured in the exact `L²` norm
//! ([`Comparison::FineEmbedding`]); sampling the reference at the coarse nodes
//! instead ([`Comparison::CoarseNodes`]) sees only the nodal error, which for
//! P1 elements is much smaller than the `L²` error.

mod lemmas;

use std::fmt::Write as _;
use std::sync::Mutex;

pub use lemmas::{validate_lemmas, Check, LemmaReport, Suite};

use crate::dg_solver::{run, stability_bound, SolverConfig, TimeGrid, Trajectory};
use crate::error::{argument, Error, Result};
use crate::fem1d::{assemble_mass, prolongate, restrict_to_nodes, SpaceGrid1D};
use crate::frac_kernel::FracOrder;
use crate::reference::{experiment_data, fine_grid_reference, time_ratio, Cache};

/// How a coarse trajectory is compared in space with a finer one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Comparison {
    /// Prolongate the coarse function to the fine grid; exact `L²` norm.
    #[default]
    FineEmbedding,
    /// Sample the fine function at the coarse nodes; coarse mass matrix.
    CoarseNodes,
}

/// `‖(U_coarse - U_fine)(t)‖_{L²}` on every fine slab, where `U_coarse` is
/// evaluated on the coarse slab containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabErrors {
    /// One entry per fine slab `i = 1..=J_fine`.
    pub values: Vec<f64>,
    /// Fine slabs per coarse slab.
    pub ratio: usize,
}

impl SlabErrors {
    /// Errors at the coarse slab endpoints `t_j-`, `j = 1..=J`.
    pub fn at_coarse_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(self.ratio - 1).step_by(self.ratio).copied()
    }

    pub fn coarse_steps(&self) -> usize {
        self.values.len() / self.ratio
    }
}

/// Differences between `coarse` and `fine`, whose grids must be nested in
/// the fine ones.
pub fn slab_errors(coarse: &Trajectory, fine: &Trajectory, cmp: Comparison) -> Result<SlabErrors> {
    let ratio = time_ratio(&fine.time, &coarse.time)?;
    let steps = fine.time.steps();
    let mut values = Vec::with_capacity(steps);
    match cmp {
        Comparison::FineEmbedding => {
            let mass = assemble_mass(&fine.space);
            let mut up = Vec::new();
            for i in 1..=steps {
                let j = i.div_ceil(ratio);
                if (i - 1) % ratio == 0 {
                    up = prolongate(coarse.slab(j), &coarse.space, &fine.space)?;
                }
                let d: Vec<f64> = up.iter().zip(fine.slab(i)).map(|(a, b)| a - b).collect();
                values.push(mass.quad_form(&d).max(0.0).sqrt());
            }
        }
        Comparison::CoarseNodes => {
            let mass = assemble_mass(&coarse.space);
            for i in 1..=steps {
                let down = restrict_to_nodes(fine.slab(i), &fine.space, &coarse.space)?;
                let d: Vec<f64> = coarse.slab(i.div_ceil(ratio)).iter().zip(&down).map(|(a, b)| a - b).collect();
                values.push(mass.quad_form(&d).max(0.0).sqrt());
            }
        }
    }
    Ok(SlabErrors { values, ratio })
}

/// `‖·‖_{L∞(0,T;L²)}` of the difference: the maximum over all fine slabs.
pub fn norm_linf_l2(d: &SlabErrors) -> f64 {
    d.values.iter().copied().fold(0.0, f64::max)
}

/// `max_{1≤j≤2^n} (j/2^n)^β ‖v(t_j-)‖` over the coarse slab endpoints;
/// `β = ∞` keeps only the final time.
pub fn norm_weighted(d: &SlabErrors, beta: f64, n: u32) -> Result<f64> {
    let steps = 1usize << n;
    if d.coarse_steps() != steps {
        return Err(argument(format!("weighted norm for n = {n} needs {steps} slabs, got {}", d.coarse_steps())));
    }
    if beta == f64::INFINITY {
        return Ok(d.values[d.values.len() - 1]);
    }
    Ok(d.at_coarse_nodes().enumerate().map(|(i, e)| ((i + 1) as f64 / steps as f64).powf(beta) * e).fold(0.0, f64::max))
}

/// `log₂(e_i/e_{i+1})` for consecutive pairs.
pub fn convergence_order(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(argument("convergence orders need at least two errors"));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(argument(format!("errors must be positive and finite, got {e}")));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// Which discretization parameter a table varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Study {
    /// `h = 2^{-m}` varies, `τ` fixed at the reference step.
    Space,
    /// `τ = 2^{-n}` varies, `h` fixed at the reference mesh.
    Time,
}

/// The norm a table reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    /// `‖·‖_{L∞(0,T;L²)}`.
    Plain,
    /// `‖·‖_{β,n}`.
    Weighted { beta: f64 },
    /// `L²` error at `t = T` only.
    FinalTime,
}

impl Norm {
    /// Weight exponent of the nodal norms; `None` for the `L∞(0,T;L²)` norm.
    pub fn beta(&self) -> Option<f64> {
        match self {
            Norm::Plain => None,
            Norm::Weighted { beta } => Some(*beta),
            Norm::FinalTime => Some(f64::INFINITY),
        }
    }

    fn apply(&self, d: &SlabErrors, n: u32) -> Result<f64> {
        match self.beta() {
            None => Ok(norm_linf_l2(d)),
            Some(b) => norm_weighted(d, b, n),
        }
    }

    /// The norm used in the published tables for experiment `id`.
    pub fn published(id: u8, study: Study, alpha: f64) -> Norm {
        match (id, study) {
            (1, Study::Time) => Norm::Weighted { beta: 1.0 },
            (1, Study::Space) => Norm::Weighted { beta: 1.0 + alpha },
            (2, Study::Space) => Norm::FinalTime,
            (2, Study::Time) => Norm::Weighted { beta: 0.0 },
            _ => Norm::Plain,
        }
    }
}

/// One convergence study for experiment `id`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub id: u8,
    pub alphas: Vec<f64>,
    /// Mesh levels of the spatial table (run at `n = ref_n`).
    pub m_list: Vec<u32>,
    /// Step levels of the temporal table (run at `m = ref_m`).
    pub n_list: Vec<u32>,
    pub ref_m: u32,
    pub ref_n: u32,
    /// `None` selects the norm of the published tables.
    pub norm: Option<Norm>,
    pub comparison: Comparison,
    /// Permits runs whose stored history exceeds [`MEMORY_GUARD_BYTES`].
    pub allow_paper_scale: bool,
    /// Concurrent cells; `0` uses the available parallelism.
    pub workers: usize,
}

/// Largest full-history trajectory a run may store without
/// [`ExperimentSpec::allow_paper_scale`].
pub const MEMORY_GUARD_BYTES: u64 = 512 << 20;

fn history_bytes(m: u32, n: u32) -> u64 {
    ((1u64 << m) - 1).saturating_mul(1u64 << n).saturating_mul(8)
}

impl ExperimentSpec {
    /// `m ∈ {3..6}` against `m = 9`; `n ∈ {5..8}` against `n = 12`, except
    /// `n = 13` for experiment 1 and `n = 16` for experiment 3, whose
    /// `τ^{1/2}` error is dominated by the first slab and needs the finer
    /// reference step to show its order.
    pub fn reduced(id: u8) -> Result<Self> {
        check_id(id)?;
        Ok(Self {
            id,
            alphas: vec![0.2, 0.4, 0.8],
            m_list: (3..=6).collect(),
            n_list: (5..=8).collect(),
            ref_m: 9,
            ref_n: match id {
                1 => 13,
                3 => 16,
                _ => 12,
            },
            norm: None,
            comparison: Comparison::default(),
            allow_paper_scale: false,
            workers: 0,
        })
    }

    /// The published grids: `m ∈ {3..6}`, `n ∈ {6..9}` against `(11, 16)`.
    pub fn paper(id: u8) -> Result<Self> {
        Ok(Self {
            m_list: (3..=6).collect(),
            n_list: (6..=9).collect(),
            ref_m: 11,
            ref_n: 16,
            allow_paper_scale: true,
            ..Self::reduced(id)?
        })
    }

    pub fn validate(&self) -> Result<()> {
        check_id(self.id)?;
        if self.alphas.is_empty() {
            return Err(argument("no alpha values given"));
        }
        for &a in &self.alphas {
            FracOrder::new(a)?;
        }
        if let Some(&m) = self.m_list.iter().find(|&&m| m < 1 || m > self.ref_m) {
            return Err(argument(format!("mesh level {m} must lie in 1..={}", self.ref_m)));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n > self.ref_n) {
            return Err(argument(format!("step level {n} exceeds the reference level {}", self.ref_n)));
        }
        if self.ref_m < 1 || self.ref_m > 24 || self.ref_n > 30 {
            return Err(argument(format!("reference levels ({}, {}) out of range", self.ref_m, self.ref_n)));
        }
        let need = history_bytes(self.ref_m, self.ref_n);
        if need > MEMORY_GUARD_BYTES && !self.allow_paper_scale {
            return Err(Error::Resource(format!(
                "reference m={} n={} stores {} MiB of history; pass the paper-scale flag to run it",
                self.ref_m,
                self.ref_n,
                need >> 20
            )));
        }
        Ok(())
    }

    fn norm_for(&self, study: Study, alpha: f64) -> Norm {
        self.norm.unwrap_or_else(|| Norm::published(self.id, study, alpha))
    }
}

fn check_id(id: u8) -> Result<()> {
    if (1..=4).contains(&id) {
        Ok(())
    } else {
        Err(argument(format!("experiment id must be 1..=4, got {id}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub study: Study,
    pub alpha: f64,
    pub m: u32,
    pub n: u32,
    /// `None` for the `L∞(0,T;L²)` norm.
    pub beta: Option<f64>,
    pub error: f64,
    /// Order against the previous row of the same study and `α`.
    pub order: Option<f64>,
}

/// `max_j ‖U_j‖` of one run against the a-priori bound.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord {
    pub alpha: f64,
    pub m: u32,
    pub n: u32,
    pub max_l2: f64,
    pub bound: f64,
}

impl StabilityRecord {
    pub fn holds(&self) -> bool {
        self.max_l2 <= self.bound + 1e-10
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub experiment: u8,
    pub rows: Vec<ErrorRow>,
    pub stability: Vec<StabilityRecord>,
}

fn fmt_beta(b: Option<f64>) -> String {
    match b {
        None => "sup".to_string(),
        Some(b) if b == f64::INFINITY => "inf".to_string(),
        Some(b) => format!("{b}"),
    }
}

impl ErrorReport {
    /// Rows of one table for one `α`, in refinement order.
    pub fn series(&self, study: Study, alpha: f64) -> Vec<&ErrorRow> {
        self.rows.iter().filter(|r| r.study == study && r.alpha == alpha).collect()
    }

    pub fn stable(&self) -> bool {
        self.stability.iter().all(StabilityRecord::holds)
    }

    /// `alpha,m,n,beta,error,order`, spatial table first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,m,n,beta,error,order\n");
        for r in &self.rows {
            let order = r.order.map(|o| format!("{o:.4}")).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{:.6e},{}", r.alpha, r.m, r.n, fmt_beta(r.beta), r.error, order);
        }
        out
    }

    /// One table per study with an error/order column pair per `α`.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let mut alphas: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !alphas.contains(&r.alpha) {
                alphas.push(r.alpha);
            }
        }
        for study in [Study::Space, Study::Time] {
            let rows: Vec<&ErrorRow> = self.rows.iter().filter(|r| r.study == study).collect();
            if rows.is_empty() {
                continue;
            }
            let (label, what) = match study {
                Study::Space => ("m", "h"),
                Study::Time => ("n", "tau"),
            };
            let _ = writeln!(out, "Experiment {}, convergence in {what}\n", self.experiment);
            let mut head = format!("| {label} |");
            let mut rule = String::from("|---|");
            for a in &alphas {
                let beta = rows.iter().find(|r| r.alpha == *a).and_then(|r| r.beta);
                let _ = write!(head, " alpha={a} (beta={}) | order |", fmt_beta(beta));
                rule.push_str("---|---|");
            }
            let _ = writeln!(out, "{head}\n{rule}");
            let mut levels: Vec<u32> = rows.iter().map(|r| if study == Study::Space { r.m } else { r.n }).collect();
            levels.sort_unstable();
            levels.dedup();
            for lvl in levels {
                let mut line = format!("| {lvl} |");
                for a in &alphas {
                    let cell =
                        rows.iter().find(|r| r.alpha == *a && (if study == Study::Space { r.m } else { r.n }) == lvl);
                    match cell {
                        Some(r) => {
                            let order = r.order.map(|o| format!("{o:.2}")).unwrap_or_else(|| "-".into());
                            let _ = write!(line, " {:.2e} | {order} |", r.error);
                        }
                        None => line.push_str(" | |"),
                    }
                }
                let _ = writeln!(out, "{line}");
            }
            out.push('\n');
        }
        out
    }
}

struct Cell {
    study: Study,
    m: u32,
    n: u32,
}

struct CellResult {
    error: f64,
    stability: StabilityRecord,
}

fn stability_of(traj: &Trajectory, id: u8, alpha: FracOrder, m: u32, n: u32) -> Result<StabilityRecord> {
    let (u0, f) = experiment_data(id, alpha)?;
    Ok(StabilityRecord {
        alpha: alpha.value(),
        m,
        n,
        max_l2: traj.max_l2(),
        bound: stability_bound(&u0, &f, traj.time.final_time())?,
    })
}

fn run_cell(spec: &ExperimentSpec, alpha: FracOrder, cell: &Cell, reference: &Trajectory) -> Result<CellResult> {
    let (u0, f) = experiment_data(spec.id, alpha)?;
    let sgrid = SpaceGrid1D::dyadic(cell.m)?;
    let tgrid = TimeGrid::dyadic(cell.n)?;
    let traj = run(u0, &f, &sgrid, &tgrid, alpha, &SolverConfig::default())?;
    let diffs = slab_errors(&traj, reference, spec.comparison)?;
    let error = spec.norm_for(cell.study, alpha.value()).apply(&diffs, cell.n)?;
    Ok(CellResult { error, stability: stability_of(&traj, spec.id, alpha, cell.m, cell.n)? })
}

fn worker_count(requested: usize, cells: usize) -> usize {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let w = if requested == 0 { avail } else { requested };
    w.clamp(1, cells.max(1))
}

/// Builds (or loads) the reference for every `α`, runs all cells and
/// collects the errors, observed orders and stability records.
pub fn run_experiment(spec: &ExperimentSpec, cache: &Cache) -> Result<ErrorReport> {
    spec.validate()?;
    let mut rows = Vec::new();
    let mut stability = Vec::new();
    for &a in &spec.alphas {
        let alpha = FracOrder::new(a)?;
        let reference = fine_grid_reference(spec.id, alpha, spec.ref_m, spec.ref_n, cache, &SolverConfig::default())?;
        stability.push(stability_of(&reference, spec.id, alpha, spec.ref_m, spec.ref_n)?);

        let mut cells: Vec<Cell> =
            spec.m_list.iter().map(|&m| Cell { study: Study::Space, m, n: spec.ref_n }).collect();
        cells.extend(spec.n_list.iter().map(|&n| Cell { study: Study::Time, m: spec.ref_m, n }));
        let results: Vec<Mutex<Option<Result<CellResult>>>> = cells.iter().map(|_| Mutex::new(None)).collect();
        let next = Mutex::new(0usize);
        std::thread::scope(|s| {
            for _ in 0..worker_count(spec.workers, cells.len()) {
                s.spawn(|| loop {
                    let i = {
                        let mut g = next.lock().unwrap();
                        let i = *g;
                        *g += 1;
                        i
                    };
                    if i >= cells.len() {
                        break;
                    }
                    let r = run_cell(spec, alpha, &cells[i], &reference);
                    *results[i].lock().unwrap() = Some(r);
                });
            }
        });

        let mut prev: Option<(Study, f64)> = None;
        for (cell, slot) in cells.iter().zip(results) {
            let res = slot.into_inner().unwrap().expect("every cell is visited")?;
            let order = match prev {
                Some((st, e)) if st == cell.study && e > 0.0 && res.error > 0.0 => Some((e / res.error).log2()),
                _ => None,
            };
            prev = Some((cell.study, res.error));
            rows.push(ErrorRow {
                study: cell.study,
                alpha: a,
                m: cell.m,
                n: cell.n,
                beta: spec.norm_for(cell.study, a).beta(),
                error: res.error,
                order,
            });
            stability.push(res.stability);
        }
    }
    rows.sort_by(|x, y| x.study.cmp(&y.study));
    Ok(ErrorReport { experiment: spec.id, rows, stability })
}
