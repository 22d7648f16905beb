mod data;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fracwave::dg_solver::{run, stability_bound, write_dump, HistoryMode, SolverConfig, TimeGrid};
use fracwave::fem1d::SpaceGrid1D;
use fracwave::frac_kernel::{conv_weights, FracOrder};
use fracwave::harness::{run_experiment, validate_lemmas, Comparison, ExperimentSpec, Suite};
use fracwave::reference::Cache;

/// Time-stepping DG solver for u' - Δ D^{-α} u = f on (0,1) x (0,1).
#[derive(Parser, Debug)]
#[command(name = "fracwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence tables of one of the four experiments.
    Experiment {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        id: u8,
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.8")]
        alpha: Vec<f64>,
        /// Use the published grids (m=11, n=16 reference); needs about 1 GiB per reference.
        #[arg(long)]
        paper_scale: bool,
        /// Mesh levels of the spatial table.
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<u32>>,
        /// Step levels of the temporal table.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        #[arg(long)]
        ref_m: Option<u32>,
        #[arg(long)]
        ref_n: Option<u32>,
        #[arg(long, value_enum, default_value_t = ComparisonArg::Embed)]
        comparison: ComparisonArg,
        /// Concurrent runs (0: all cores).
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Output file; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// One run of the scheme.
    Solve {
        #[arg(long)]
        alpha: f64,
        /// h = 2^-m.
        #[arg(long)]
        m: u32,
        /// tau = 2^-n (T = 1).
        #[arg(long)]
        n: u32,
        /// Initial value: zero, x^P or sin(K).
        #[arg(long, default_value = "zero", allow_hyphen_values = true)]
        u0: String,
        /// Source: zero, a spatial function, or spatial*t^Q.
        #[arg(long, default_value = "zero", allow_hyphen_values = true)]
        f: String,
        #[arg(long, value_enum, default_value_t = HistoryArg::Fft)]
        history: HistoryArg,
        /// Write the trajectory in the binary dump format.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Run a validation suite.
    Validate {
        #[arg(long, value_enum)]
        suite: SuiteArg,
    },
    /// Convolution weights b_j and w_j.
    Weights {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        count: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Md,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ComparisonArg {
    Embed,
    Nodes,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum HistoryArg {
    Naive,
    Fft,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Psi,
    Ode,
    Fem,
    Adjoint,
    Stability,
    All,
}

enum Failure {
    Usage(String),
    Validation(String),
}

impl From<fracwave::Error> for Failure {
    fn from(e: fracwave::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Experiment { id, alpha, paper_scale, m, n, ref_m, ref_n, comparison, workers, out, format } => {
            let mut spec = if paper_scale { ExperimentSpec::paper(id)? } else { ExperimentSpec::reduced(id)? };
            spec.alphas = alpha;
            if let Some(m) = m {
                spec.m_list = m;
            }
            if let Some(n) = n {
                spec.n_list = n;
            }
            if let Some(r) = ref_m {
                spec.ref_m = r;
            }
            if let Some(r) = ref_n {
                spec.ref_n = r;
            }
            spec.comparison = match comparison {
                ComparisonArg::Embed => Comparison::FineEmbedding,
                ComparisonArg::Nodes => Comparison::CoarseNodes,
            };
            spec.workers = workers;
            let report = run_experiment(&spec, &Cache::from_env())?;
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Md => report.to_markdown(),
            };
            emit(&out, &text)?;
            if !report.stable() {
                let bad = report.stability.iter().filter(|s| !s.holds()).count();
                return Err(Failure::Validation(format!("{bad} run(s) violate the stability bound")));
            }
            Ok(())
        }
        Command::Solve { alpha, m, n, u0, f, history, dump } => {
            let alpha = FracOrder::new(alpha)?;
            let u0 = data::parse_spatial(&u0).map_err(Failure::Usage)?;
            let f = data::parse_forcing(&f).map_err(Failure::Usage)?;
            let sgrid = SpaceGrid1D::dyadic(m)?;
            let tgrid = TimeGrid::dyadic(n)?;
            let config = SolverConfig {
                history_mode: match history {
                    HistoryArg::Naive => HistoryMode::Naive,
                    HistoryArg::Fft => HistoryMode::FftBlocked,
                },
                store_full_history: dump.is_some(),
                ..SolverConfig::default()
            };
            let bound = stability_bound(&u0, &f, tgrid.final_time())?;
            let traj = run(u0, &f, &sgrid, &tgrid, alpha, &config)?;
            println!("alpha,m,n,norm_u0h,norm_final,max_norm,stability_bound");
            println!(
                "{},{m},{n},{:.12e},{:.12e},{:.12e},{:.12e}",
                alpha.value(),
                traj.norms[0],
                traj.norms[tgrid.steps()],
                traj.max_l2(),
                bound
            );
            if let Some(p) = dump {
                write_dump(&traj, &p)?;
            }
            if traj.max_l2() > bound + 1e-10 {
                return Err(Failure::Validation("stability bound violated".into()));
            }
            Ok(())
        }
        Command::Validate { suite } => {
            let suites: Vec<Suite> = match suite {
                SuiteArg::Psi => vec![Suite::Psi],
                SuiteArg::Ode => vec![Suite::Ode],
                SuiteArg::Fem => vec![Suite::Fem],
                SuiteArg::Adjoint => vec![Suite::Adjoint],
                SuiteArg::Stability => vec![Suite::Stability],
                SuiteArg::All => Suite::ALL.to_vec(),
            };
            let mut failed = 0;
            for s in suites {
                let report = validate_lemmas(s)?;
                print!("{report}");
                failed += report.checks.iter().filter(|c| !c.passed).count();
            }
            if failed > 0 {
                return Err(Failure::Validation(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        Command::Weights { alpha, count } => {
            let w = conv_weights(FracOrder::new(alpha)?, count)?;
            println!("j,b_j,w_j");
            for (j, b) in w.b().iter().enumerate() {
                let wj = if j >= 1 && j < w.w().len() { format!("{:.17e}", w.w()[j]) } else { String::new() };
                println!("{j},{b:.17e},{wj}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(2)
        }
    }
}
